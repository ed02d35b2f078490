"""Effective elasticity tensor from three unit-quasiperiod solves.

The tensor is computed strain-controlled; stress-controlled loadings with a
prescribed cell-average stress are synthesized by superposition of the three
unit solves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverError, ValidationError
from .fem import (
    CellSolution,
    Quasiperiod,
    SolverOptions,
    average_stress,
    combine_solutions,
    solve_cell_problem,
)
from .geometry import CellGeometry
from .material import IsotropicModuli


@dataclass(frozen=True)
class EffectiveTensor:
    """Voigt matrix mapping (xi11, xi22, 2*xi12) to average stress."""

    matrix: np.ndarray  # (3, 3)
    k_star: float
    g_star: float
    g45_star: float
    symmetry_residual: float

    @property
    def moduli_triple(self) -> tuple[float, float, float]:
        return self.k_star, self.g_star, self.g45_star


@dataclass(frozen=True)
class MacroStress:
    s11: float
    s22: float
    s12: float

    def as_vector(self) -> np.ndarray:
        return np.array([self.s11, self.s22, self.s12])


def symmetry_residual_of(c: np.ndarray) -> float:
    """Max square-symmetry defect, normalized by the Frobenius norm."""
    scale = np.linalg.norm(c)
    if scale == 0.0:
        return 0.0
    defects = (abs(c[0, 0] - c[1, 1]), abs(c[0, 2]), abs(c[1, 2]),
               abs(c[0, 1] - c[1, 0]))
    return max(defects) / scale


def effective_tensor(g: CellGeometry, m: IsotropicModuli,
                     opts: SolverOptions | None = None,
                     ) -> tuple[EffectiveTensor, list[CellSolution]]:
    """Effective matrix, its extracted moduli, and the three unit solves."""
    sols = [solve_cell_problem(g, m, Quasiperiod.from_vector(e), opts)
            for e in np.eye(3)]
    c = np.column_stack([average_stress(s, g) for s in sols])
    k_star = (c[0, 0] + c[0, 1]) / 2.0
    g_star = (c[0, 0] - c[0, 1]) / 2.0
    g45_star = c[2, 2]
    if k_star <= 0 or g_star <= 0 or g45_star <= 0:
        raise ValidationError("effective tensor not positive definite")
    eff = EffectiveTensor(matrix=c, k_star=k_star, g_star=g_star,
                          g45_star=g45_star,
                          symmetry_residual=symmetry_residual_of(c))
    return eff, sols


def solve_stress_controlled(g: CellGeometry, m: IsotropicModuli, eta: MacroStress,
                            eff: EffectiveTensor,
                            unit_solves: list[CellSolution]) -> CellSolution:
    """Solution whose cell-average stress equals eta, by superposition."""
    if abs(np.linalg.det(eff.matrix)) < 1e-300:
        raise SolverError("effective matrix is singular")
    coeffs = np.linalg.solve(eff.matrix, eta.as_vector())
    return combine_solutions(unit_solves, coeffs)


def hydrostatic_and_shear_loadings() -> list[MacroStress]:
    """The three canonical average-stress loadings separating K*, G*, G45*."""
    return [MacroStress(1.0, 0.0, 0.0),
            MacroStress(1.0, 1.0, 0.0),
            MacroStress(0.0, 0.0, 1.0)]
