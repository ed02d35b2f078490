import json
import pathlib
import subprocess
import sys

import pytest

from vigcell.cli import main

GEOM = pathlib.Path(__file__).resolve().parent.parent / "geometries"


def run(args, out=None):
    argv = list(args)
    if out is not None:
        argv += ["--out", str(out)]
    code = main(argv)
    report = json.loads(out.read_text()) if out is not None else None
    return code, report


def test_effective_homogeneous(tmp_path):
    code, rep = run(["effective", "--geometry", str(GEOM / "full8.cell"),
                     "--K", "2", "--G", "1"], tmp_path / "r.json")
    assert code == 0
    eff = rep["effective"]
    assert abs(eff["K_star"] - 2.0) < 1e-12
    assert abs(eff["G_star"] - 1.0) < 1e-12
    assert abs(eff["G45_star"] - 1.0) < 1e-12
    assert rep["geometry"]["rho"] == 1.0
    assert rep["meta"]["command"] == "effective"
    assert rep["meta"]["config"]["K"] == 2.0


def test_missing_geometry_exits_2(capsys):
    code = main(["effective", "--geometry", "no/such/file.cell",
                 "--K", "1", "--G", "1"])
    assert code == 2
    assert "cannot read geometry" in capsys.readouterr().err


def test_malformed_geometry_exits_2(tmp_path):
    bad = tmp_path / "bad.cell"
    bad.write_text("2 2 1.0 1.0\n##\n##")  # missing final newline
    code = main(["effective", "--geometry", str(bad), "--K", "1", "--G", "1"])
    assert code == 2


def test_missing_moduli_exits_2():
    code = main(["effective", "--geometry", str(GEOM / "full8.cell")])
    assert code == 2


def test_bad_samples_exits_2():
    code = main(["vigdergauz", "--geometry", str(GEOM / "full8.cell"),
                 "--samples", "1,1;oops"])
    assert code == 2


def test_asymmetric_geometry_exits_4(capsys):
    code = main(["effective", "--geometry", str(GEOM / "asym16.cell"),
                 "--K", "1", "--G", "1"])
    assert code == 4
    assert "symmetry" in capsys.readouterr().err


def test_asymmetric_passes_with_loose_symtol(tmp_path):
    code, rep = run(["effective", "--geometry", str(GEOM / "asym16.cell"),
                     "--K", "1", "--G", "1", "--symtol", "1.0"],
                    tmp_path / "r.json")
    assert code == 0
    assert rep["geometry"]["square_symmetric_mask"] is False


def test_vigdergauz_full_material(tmp_path):
    code, rep = run(["vigdergauz", "--geometry", str(GEOM / "full8.cell"),
                     "--samples", "1,1;3,2"], tmp_path / "r.json")
    assert code == 0
    routes = rep["vigdergauz"]["routes"]
    for key in ("closed_form", "line_integral"):
        for v in routes[key].values():
            assert abs(v) < 1e-10
    assert abs(routes["derivative_line"]["A3"]) < 1e-10
    spread = rep["vigdergauz"]["spread"]
    assert spread["A1"] < 1e-10 and spread["A2"] < 1e-10 and spread["A3"] < 1e-10
    assert rep["vigdergauz"]["eigenvalue_check"] < 1e-12


def test_vigdergauz_no_lines_exits_5(tmp_path):
    code, rep = run(["vigdergauz", "--geometry", str(GEOM / "staggered16.cell"),
                     "--K", "1", "--G", "1"], tmp_path / "r.json")
    assert code == 5
    routes = rep["vigdergauz"]["routes"]
    assert routes["line_integral"] == "not applicable"
    assert routes["derivative_line"] == "not applicable"
    assert "A1" in routes["closed_form"]


def test_vigdergauz_lattice(tmp_path):
    code, rep = run(["vigdergauz", "--geometry", str(GEOM / "lattice32.cell"),
                     "--K", "1", "--G", "1"], tmp_path / "r.json")
    assert code == 0
    assert all(v > 0 for v in rep["vigdergauz"]["hs_margin"])


def test_verify_lattice_default_thresholds(tmp_path):
    code, rep = run(["verify", "--geometry", str(GEOM / "lattice32.cell"),
                     "--K", "1", "--G", "1"], tmp_path / "r.json")
    assert code == 0
    assert rep["verify"]["failures"] == []
    assert len(rep["verify"]["loadings"]) == 3


def test_verify_zero_thresholds_exits_1(tmp_path, capsys):
    code, rep = run(["verify", "--geometry", str(GEOM / "lattice32.cell"),
                     "--K", "1", "--G", "1", "--threshold", "0.0",
                     "--shear-threshold", "0.0"], tmp_path / "r.json")
    assert code == 1
    assert rep["verify"]["failures"]
    assert "FAIL" in capsys.readouterr().err


def test_verify_no_lines_exits_5():
    code = main(["verify", "--geometry", str(GEOM / "staggered16.cell"),
                 "--K", "1", "--G", "1"])
    assert code == 5


def test_oracle_flag_matches_iterative(tmp_path):
    _, rep_cg = run(["effective", "--geometry", str(GEOM / "lattice32.cell"),
                     "--K", "1", "--G", "1"], tmp_path / "a.json")
    _, rep_dr = run(["effective", "--geometry", str(GEOM / "lattice32.cell"),
                     "--K", "1", "--G", "1", "--oracle"], tmp_path / "b.json")
    for a, b in zip(rep_cg["effective"]["effective_matrix"],
                    rep_dr["effective"]["effective_matrix"]):
        assert abs(a - b) < 1e-9


def test_refine_flag(tmp_path):
    code, rep = run(["effective", "--geometry", str(GEOM / "full8.cell"),
                     "--K", "1", "--G", "1", "--refine", "2"], tmp_path / "r.json")
    assert code == 0
    assert rep["geometry"]["nx"] == 16


def test_dump_flag(tmp_path):
    dump = tmp_path / "fields.json"
    code, _ = run(["effective", "--geometry", str(GEOM / "full8.cell"),
                   "--K", "1", "--G", "1", "--dump", str(dump)],
                  tmp_path / "r.json")
    assert code == 0
    fields = json.loads(dump.read_text())
    assert len(fields) == 3
    assert set(fields[0]) == {"xi", "energy", "stress", "strain", "fluctuation"}


def test_sweep_refine_with_csv(tmp_path):
    csv_path = tmp_path / "sweep.csv"
    code, rep = run(["sweep-refine", "--geometry", str(GEOM / "lattice32.cell"),
                     "--K", "1", "--G", "1", "--csv", str(csv_path)],
                    tmp_path / "r.json")
    assert code == 0
    levels = rep["sweep"]["levels"]
    assert [lv["refine"] for lv in levels] == [1, 2, 4]
    lines = csv_path.read_text().strip().split("\n")
    assert len(lines) == 4 and lines[0].startswith("refine,")


def test_determinism_byte_identical(tmp_path):
    args = ["vigdergauz", "--geometry", str(GEOM / "lattice32.cell"),
            "--samples", "1,1;3,1"]
    out = tmp_path / "r.json"
    assert main(args + ["--out", str(out)]) == 0
    b1 = out.read_bytes()
    assert main(args + ["--out", str(out)]) == 0
    assert b1 == out.read_bytes()


def test_module_invocation_subprocess(tmp_path):
    out = tmp_path / "r.json"
    proc = subprocess.run(
        [sys.executable, "-m", "vigcell.cli", "effective",
         "--geometry", str(GEOM / "full8.cell"), "--K", "1", "--G", "1",
         "--out", str(out)],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(out.read_text())["effective"]["K_star"] == 1.0
