"""Command-line front end: effective, vigdergauz, verify, sweep-refine.

Reports are JSON with top-level keys "geometry", "effective", "vigdergauz",
"verify", "meta".  Exit codes: 0 success, 1 verify thresholds exceeded,
2 validation error, 3 solver failure, 4 square-symmetry failure,
5 line-based routes not applicable.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .errors import (
    NotApplicableError,
    SolverError,
    SymmetryError,
    ValidationError,
)
from .fem import SolverOptions
from .geometry import (
    CellGeometry,
    find_transversal_lines,
    is_square_symmetric_geometry,
    parse_cell,
    replicate,
    volume_fraction,
)
from .homogenization import (
    MacroStress,
    effective_tensor,
    hydrostatic_and_shear_loadings,
    solve_stress_controlled,
)
from .material import IsotropicModuli, compliance_matrix
from .vigdergauz import (
    compliance_eigenvalues,
    constant_a3_derivative,
    constants_closed_form,
    constants_line_integral,
    hs_bound_margin,
    independence_report,
)
from .verify import check_lemma1, check_lemma2_normal, check_lemma2_shear

EXIT_OK = 0
EXIT_THRESHOLD = 1
EXIT_VALIDATION = 2
EXIT_SOLVER = 3
EXIT_SYMMETRY = 4
EXIT_NOT_APPLICABLE = 5


def _parse_samples(text: str) -> list[IsotropicModuli]:
    samples = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        try:
            k_str, g_str = part.split(",")
            samples.append(IsotropicModuli(float(k_str), float(g_str)))
        except ValueError as exc:
            raise ValidationError(f"bad --samples entry {part!r}: {exc}") from None
    if not samples:
        raise ValidationError("empty --samples list")
    return samples


def _parse_eta(text: str) -> MacroStress:
    try:
        s11, s22, s12 = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise ValidationError(f"bad --eta value {text!r}: {exc}") from None
    return MacroStress(s11, s22, s12)


def _load_geometry(args) -> CellGeometry:
    try:
        with open(args.geometry, "r", encoding="ascii") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read geometry file: {exc}") from None
    g = parse_cell(text)
    if args.refine > 1:
        g = replicate(g, args.refine)
    return g


def _moduli_list(args) -> list[IsotropicModuli]:
    if args.samples is not None:
        if args.K is not None or args.G is not None:
            raise ValidationError("give either --K/--G or --samples, not both")
        return _parse_samples(args.samples)
    if args.K is None or args.G is None:
        raise ValidationError("moduli required: --K and --G, or --samples")
    return [IsotropicModuli(args.K, args.G)]


def _geometry_summary(g: CellGeometry, path: str) -> dict:
    lines = find_transversal_lines(g)
    try:
        square = is_square_symmetric_geometry(g)
    except ValidationError:
        square = None  # not testable by rotation
    return {
        "path": path,
        "nx": g.nx,
        "ny": g.ny,
        "l1": g.l1,
        "l2": g.l2,
        "rho": volume_fraction(g),
        "transversal_rows": list(lines.rows),
        "transversal_cols": list(lines.cols),
        "chosen_row": lines.chosen_row,
        "chosen_col": lines.chosen_col,
        "square_symmetric_mask": square,
    }


def _effective_fragment(eff) -> dict:
    return {
        "effective_matrix": [float(v) for v in eff.matrix.ravel()],
        "K_star": float(eff.k_star),
        "G_star": float(eff.g_star),
        "G45_star": float(eff.g45_star),
        "symmetry_residual": float(eff.symmetry_residual),
    }


def _solve_effective(g, m, opts, symtol):
    eff, sols = effective_tensor(g, m, opts)
    if eff.symmetry_residual > symtol:
        raise SymmetryError(eff.symmetry_residual, symtol)
    return eff, sols


def _eigenvalue_check(m, eff, constants) -> float:
    """Max deviation of the compliance spectrum from the separated formulas."""
    comp = compliance_matrix(IsotropicModuli(eff.k_star, eff.g_star))
    comp[2, 2] = 1.0 / eff.g45_star
    spectrum = np.sort(np.linalg.eigvalsh(comp))
    predicted = np.sort(compliance_eigenvalues(m, constants))
    return float(np.max(np.abs(spectrum - predicted)))


def _vigdergauz_fragment(g, m, eff, sols, opts, samples, etas, coarsen=1) -> tuple[dict, bool]:
    """Vigdergauz report for one geometry; returns (fragment, line routes applicable)."""
    lines = find_transversal_lines(g)
    rho = volume_fraction(g)
    cf = constants_closed_form(m, eff.moduli_triple)
    routes = {"closed_form": {"A1": cf.a1, "A2": cf.a2, "A3": cf.a3}}
    applicable = lines.applicable
    if applicable:
        s11 = solve_stress_controlled(g, m, MacroStress(1, 0, 0), eff, sols)
        s12 = solve_stress_controlled(g, m, MacroStress(0, 0, 1), eff, sols)
        a1, a2 = constants_line_integral(s11, g, lines)
        routes["line_integral"] = {"A1": a1, "A2": a2}
        try:
            routes["derivative_line"] = {"A3": constant_a3_derivative(s12, g, lines)}
        except NotApplicableError:
            routes["derivative_line"] = "not applicable"
            applicable = False
    else:
        routes["line_integral"] = "not applicable"
        routes["derivative_line"] = "not applicable"
    fragment = {
        "routes": routes,
        "rho": rho,
        "hs_margin": list(hs_bound_margin(rho, cf)),
        "eigenvalue_check": _eigenvalue_check(m, eff, cf),
    }
    if len(samples) >= 2:
        rep = independence_report(g, samples, etas, opts, coarsen=coarsen)
        fragment["spread"] = {
            "A1": rep.relative_spread[0],
            "A2": rep.relative_spread[1],
            "A3": rep.relative_spread[2],
            "stress_field": rep.stress_field_spread,
            "stress_field_gauss": rep.stress_field_spread_gauss,
        }
    return fragment, applicable


def _verify_fragment(g, m, eff, sols, thresholds) -> tuple[dict, list]:
    """Lemma residual report over the canonical loadings; returns failures."""
    lines = find_transversal_lines(g)
    if not lines.applicable:
        raise NotApplicableError("no transversal lines: lemma checks not applicable")
    threshold, shear_threshold = thresholds
    failures = []
    fragment = {"lines_used": {"row": lines.chosen_row, "col": lines.chosen_col},
                "loadings": []}
    for eta in hydrostatic_and_shear_loadings():
        sol = solve_stress_controlled(g, m, eta, eff, sols)
        entry = {"eta": list(eta.as_vector())}
        r1 = check_lemma1(sol, g, lines)
        entry["lemma1"] = dict(r1.lemma1)
        entry["line_independence"] = dict(r1.line_independence)
        r2 = check_lemma2_normal(sol, g, lines, m)
        entry["lemma2_normal"] = {k: v for k, v in r2.lemma2_normal.items()
                                  if not k.endswith("_reconstructed")}
        for name, value in {**entry["lemma1"], **entry["line_independence"],
                            **entry["lemma2_normal"]}.items():
            if value > threshold:
                failures.append((f"eta={entry['eta']} {name}", value, threshold))
        try:
            r3 = check_lemma2_shear(sol, g, lines, m)
            shear = r3.lemma2_shear["xi12"]
            entry["lemma2_shear"] = {"xi12": shear}
            if shear > shear_threshold:
                failures.append((f"eta={entry['eta']} lemma2_shear.xi12",
                                 shear, shear_threshold))
        except NotApplicableError:
            entry["lemma2_shear"] = "not applicable"
        fragment["loadings"].append(entry)
    return fragment, failures


def cmd_effective(args) -> tuple[dict, int]:
    g = _load_geometry(args)
    moduli = _moduli_list(args)
    if len(moduli) != 1:
        raise ValidationError("effective takes exactly one moduli pair")
    opts = SolverOptions(rel_tolerance=args.tol, use_oracle=args.oracle)
    eff, sols = _solve_effective(g, moduli[0], opts, args.symtol)
    report = {
        "geometry": _geometry_summary(g, args.geometry),
        "effective": _effective_fragment(eff),
    }
    if args.dump is not None:
        from .fem import solution_dict

        with open(args.dump, "w", encoding="ascii") as fh:
            json.dump([solution_dict(s, g) for s in sols], fh)
    return report, EXIT_OK


def cmd_vigdergauz(args) -> tuple[dict, int]:
    g = _load_geometry(args)
    moduli = _moduli_list(args)
    opts = SolverOptions(rel_tolerance=args.tol, use_oracle=args.oracle)
    etas = ([_parse_eta(t) for t in args.eta] if args.eta
            else hydrostatic_and_shear_loadings())
    eff, sols = _solve_effective(g, moduli[0], opts, args.symtol)
    fragment, applicable = _vigdergauz_fragment(g, moduli[0], eff, sols, opts,
                                                moduli, etas)
    report = {
        "geometry": _geometry_summary(g, args.geometry),
        "effective": _effective_fragment(eff),
        "vigdergauz": fragment,
    }
    return report, EXIT_OK if applicable else EXIT_NOT_APPLICABLE


def cmd_verify(args) -> tuple[dict, int]:
    g = _load_geometry(args)
    moduli = _moduli_list(args)
    if len(moduli) != 1:
        raise ValidationError("verify takes exactly one moduli pair")
    opts = SolverOptions(rel_tolerance=args.tol, use_oracle=args.oracle)
    eff, sols = _solve_effective(g, moduli[0], opts, args.symtol)
    fragment, failures = _verify_fragment(g, moduli[0], eff, sols,
                                          (args.threshold, args.shear_threshold))
    fragment["failures"] = [
        {"check": name, "residual": value, "threshold": thr}
        for name, value, thr in failures
    ]
    report = {
        "geometry": _geometry_summary(g, args.geometry),
        "effective": _effective_fragment(eff),
        "verify": fragment,
    }
    if failures:
        for name, value, thr in failures:
            print(f"FAIL {name}: {value:.3e} > {thr:.3e}", file=sys.stderr)
        return report, EXIT_THRESHOLD
    return report, EXIT_OK


def cmd_sweep_refine(args) -> tuple[dict, int]:
    base = _load_geometry(args)
    moduli = _moduli_list(args)
    opts = SolverOptions(rel_tolerance=args.tol, use_oracle=args.oracle)
    etas = hydrostatic_and_shear_loadings()
    levels = []
    worst_exit = EXIT_OK
    for k in (1, 2, 4):
        g = replicate(base, k)
        eff, sols = _solve_effective(g, moduli[0], opts, args.symtol)
        fragment, applicable = _vigdergauz_fragment(g, moduli[0], eff, sols, opts,
                                                    moduli, etas, coarsen=k)
        level = {
            "refine": k,
            "nx": g.nx,
            "ny": g.ny,
            "rho": volume_fraction(g),
            "effective": _effective_fragment(eff),
            "vigdergauz": fragment,
        }
        try:
            verify_frag, _ = _verify_fragment(
                g, moduli[0], eff, sols, (args.threshold, args.shear_threshold))
            level["verify"] = verify_frag
        except NotApplicableError:
            level["verify"] = "not applicable"
            applicable = False
        if not applicable:
            worst_exit = EXIT_NOT_APPLICABLE
        levels.append(level)
    report = {
        "geometry": _geometry_summary(base, args.geometry),
        "sweep": {"levels": levels},
    }
    if args.csv is not None:
        _write_sweep_csv(levels, args.csv)
    return report, worst_exit


def _write_sweep_csv(levels, path) -> None:
    import csv

    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(["refine", "nx", "K_star", "G_star", "G45_star",
                         "A1_closed", "A2_closed", "A3_closed",
                         "A1_line", "A2_line", "A3_derivative"])
        for lv in levels:
            routes = lv["vigdergauz"]["routes"]
            line = routes.get("line_integral")
            deriv = routes.get("derivative_line")
            writer.writerow([
                lv["refine"], lv["nx"],
                repr(lv["effective"]["K_star"]),
                repr(lv["effective"]["G_star"]),
                repr(lv["effective"]["G45_star"]),
                repr(routes["closed_form"]["A1"]),
                repr(routes["closed_form"]["A2"]),
                repr(routes["closed_form"]["A3"]),
                repr(line["A1"]) if isinstance(line, dict) else "",
                repr(line["A2"]) if isinstance(line, dict) else "",
                repr(deriv["A3"]) if isinstance(deriv, dict) else "",
            ])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vigcell",
        description="Effective moduli and Vigdergauz constants of perforated "
                    "periodic pixel cells.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "effective": cmd_effective,
        "vigdergauz": cmd_vigdergauz,
        "verify": cmd_verify,
        "sweep-refine": cmd_sweep_refine,
    }
    for name, func in specs.items():
        p = sub.add_parser(name)
        p.add_argument("--geometry", required=True, help=".cell geometry file")
        p.add_argument("--K", type=float, default=None, help="planar bulk modulus")
        p.add_argument("--G", type=float, default=None, help="shear modulus")
        p.add_argument("--samples", default=None,
                       help="moduli list 'K1,G1;K2,G2;...'")
        p.add_argument("--eta", action="append", default=None,
                       help="target average stress 's11,s22,s12' (repeatable)")
        p.add_argument("--tol", type=float, default=1e-10,
                       help="solver relative tolerance")
        p.add_argument("--symtol", type=float, default=1e-6,
                       help="square-symmetry tolerance on the effective matrix")
        p.add_argument("--out", default=None, help="report path (default stdout)")
        p.add_argument("--oracle", action="store_true",
                       help="direct factorization instead of iterative solve")
        p.add_argument("--refine", type=int, default=1,
                       help="pixel replication factor applied to the geometry")
        p.add_argument("--threshold", type=float, default=1e-2,
                       help="verify: residual gate for lemma checks")
        p.add_argument("--shear-threshold", type=float, default=1e-1,
                       help="verify: looser gate for the shear reconstruction")
        p.add_argument("--dump", default=None,
                       help="effective: write the unit-solve field dump here")
        p.add_argument("--csv", default=None,
                       help="sweep-refine: also write a CSV trajectory table")
        p.set_defaults(func=func)
    return parser


def _emit(report: dict, args) -> None:
    report = {**report, "meta": {
        "version": __version__,
        "command": args.command,
        "config": {
            k: v for k, v in sorted(vars(args).items())
            if k not in ("func",) and v is not None
        },
    }}
    text = json.dumps(report, indent=2, allow_nan=False) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report, code = args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SymmetryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SYMMETRY
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except NotApplicableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_APPLICABLE
    _emit(report, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
