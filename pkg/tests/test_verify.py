import pytest

import vigcell as vc
from vigcell.errors import NotApplicableError
from vigcell.fem import Quasiperiod, solve_cell_problem
from vigcell.homogenization import MacroStress


@pytest.fixture(scope="module")
def lattice_canonical(lattice32_unit_solves, lattice32):
    m, eff, sols = lattice32_unit_solves
    per_eta = [vc.solve_stress_controlled(lattice32, m, eta, eff, sols)
               for eta in vc.hydrostatic_and_shear_loadings()]
    return m, per_eta


def test_lemma1_full_material(full8):
    m = vc.IsotropicModuli(1.0, 1.0)
    sol = solve_cell_problem(full8, m, Quasiperiod(1.0, 0.2, 0.1))
    lines = vc.find_transversal_lines(full8)
    res = vc.check_lemma1(sol, full8, lines)
    assert max(res.lemma1.values()) < 1e-13
    assert max(res.line_independence.values()) < 1e-13


def test_lemma1_lattice_discretely_exact(lattice_canonical, lattice32):
    m, per_eta = lattice_canonical
    lines = vc.find_transversal_lines(lattice32)
    for sol in per_eta:
        res = vc.check_lemma1(sol, lattice32, lines)
        # the line identities are identities of the discrete solution too,
        # so residuals sit at the solver tolerance, not at O(h)
        assert max(res.lemma1.values()) < 1e-9
        assert max(res.line_independence.values()) < 1e-8


def test_lemma2_normal_lattice(lattice_canonical, lattice32):
    m, per_eta = lattice_canonical
    lines = vc.find_transversal_lines(lattice32)
    for sol in per_eta:
        res = vc.check_lemma2_normal(sol, lattice32, lines, m)
        assert res.lemma2_normal["xi11"] < 1e-9
        assert res.lemma2_normal["xi22"] < 1e-9


def test_lemma2_shear_lattice(lattice_canonical, lattice32):
    m, per_eta = lattice_canonical
    lines = vc.find_transversal_lines(lattice32)
    res = vc.check_lemma2_shear(per_eta[2], lattice32, lines, m)
    # finite-difference derivative of the stress trace: O(h) accuracy
    assert res.lemma2_shear["xi12"] < 0.05
    assert res.lines_used["row"] is not None


def test_lemma2_shear_full_material(full8):
    m = vc.IsotropicModuli(2.0, 1.0)
    sol = solve_cell_problem(full8, m, Quasiperiod(0.0, 0.0, 0.5))
    lines = vc.find_transversal_lines(full8)
    res = vc.check_lemma2_shear(sol, full8, lines, m)
    # homogeneous field: the derivative terms vanish identically
    assert res.lemma2_shear["xi12"] < 1e-13


def test_checks_require_lines(staggered16):
    m = vc.IsotropicModuli(1.0, 1.0)
    sol = solve_cell_problem(staggered16, m, Quasiperiod(1.0, 0.0, 0.0))
    lines = vc.find_transversal_lines(staggered16)
    for check in (vc.check_lemma1,):
        with pytest.raises(NotApplicableError):
            check(sol, staggered16, lines)
    with pytest.raises(NotApplicableError):
        vc.check_lemma2_normal(sol, staggered16, lines, m)
    with pytest.raises(NotApplicableError):
        vc.check_lemma2_shear(sol, staggered16, lines, m)


def test_all_residuals_flattening(lattice_canonical, lattice32):
    m, per_eta = lattice_canonical
    lines = vc.find_transversal_lines(lattice32)
    res = vc.check_lemma1(per_eta[0], lattice32, lines)
    flat = res.all_residuals()
    assert "lemma1.s11_vertical" in flat
    assert flat["lemma1.s11_vertical"] == res.lemma1["s11_vertical"]
