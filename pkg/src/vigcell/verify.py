"""Numerical checks of the line-average and quasiperiod identities.

Each check returns relative residuals: stress identities are normalized by
the norm of the cell-average stress, quasiperiod reconstructions by the norm
of the prescribed quasiperiod, both with an absolute floor.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotApplicableError
from .fem import (
    CellSolution,
    average_stress,
    line_average_stress,
    trace_derivative_line_integral,
)
from .geometry import CellGeometry, TransversalLines, find_derivative_lines
from .material import IsotropicModuli

SCALE_FLOOR = 1e-14


@dataclass
class LemmaResiduals:
    lemma1: dict = field(default_factory=dict)
    line_independence: dict = field(default_factory=dict)
    lemma2_normal: dict = field(default_factory=dict)
    lemma2_shear: dict = field(default_factory=dict)
    scale: float = 0.0
    lines_used: dict = field(default_factory=dict)

    def all_residuals(self) -> dict:
        out = {}
        for group in ("lemma1", "line_independence", "lemma2_normal", "lemma2_shear"):
            for k, v in getattr(self, group).items():
                out[f"{group}.{k}"] = v
        return out


def check_lemma1(sol: CellSolution, g: CellGeometry,
                 lines: TransversalLines) -> LemmaResiduals:
    """Line averages vs. cell averages, plus variation across parallel lines."""
    if not lines.applicable:
        raise NotApplicableError("no transversal lines in this cell")
    avg = average_stress(sol, g)
    scale = max(float(np.linalg.norm(avg)), SCALE_FLOOR)
    vert = line_average_stress(sol, g, "vertical", lines.chosen_col)
    horiz = line_average_stress(sol, g, "horizontal", lines.chosen_row)
    res = LemmaResiduals(scale=scale)
    res.lines_used = {"row": lines.chosen_row, "col": lines.chosen_col}
    res.lemma1 = {
        "s11_vertical": abs(vert[0] - avg[0]) / scale,
        "s22_horizontal": abs(horiz[1] - avg[1]) / scale,
        "s12_vertical": abs(vert[2] - avg[2]) / scale,
        "s12_horizontal": abs(horiz[2] - avg[2]) / scale,
    }
    h_avgs = np.array([line_average_stress(sol, g, "horizontal", r) for r in lines.rows])
    v_avgs = np.array([line_average_stress(sol, g, "vertical", c) for c in lines.cols])
    res.line_independence = {
        "s11_vertical": float(np.ptp(v_avgs[:, 0])) / scale,
        "s12_vertical": float(np.ptp(v_avgs[:, 2])) / scale,
        "s22_horizontal": float(np.ptp(h_avgs[:, 1])) / scale,
        "s12_horizontal": float(np.ptp(h_avgs[:, 2])) / scale,
    }
    return res


def _xi_scale(sol: CellSolution) -> float:
    xi = sol.quasiperiod
    return max(float(np.linalg.norm([xi.xi11, xi.xi22, xi.xi12])), SCALE_FLOOR)


def check_lemma2_normal(sol: CellSolution, g: CellGeometry, lines: TransversalLines,
                        m: IsotropicModuli) -> LemmaResiduals:
    """Reconstruct xi11, xi22 from line and cell averages of the stress."""
    if not lines.applicable:
        raise NotApplicableError("no transversal lines in this cell")
    avg = average_stress(sol, g)
    l1_s11 = line_average_stress(sol, g, "horizontal", lines.chosen_row)[0]
    l2_s22 = line_average_stress(sol, g, "vertical", lines.chosen_col)[1]
    rec11 = (l1_s11 + avg[1]) / (4.0 * m.K) + (l1_s11 - avg[1]) / (4.0 * m.G)
    rec22 = (l2_s22 + avg[0]) / (4.0 * m.K) + (l2_s22 - avg[0]) / (4.0 * m.G)
    scale = _xi_scale(sol)
    res = LemmaResiduals(scale=scale)
    res.lines_used = {"row": lines.chosen_row, "col": lines.chosen_col}
    res.lemma2_normal = {
        "xi11": abs(sol.quasiperiod.xi11 - rec11) / scale,
        "xi22": abs(sol.quasiperiod.xi22 - rec22) / scale,
        "xi11_reconstructed": float(rec11),
        "xi22_reconstructed": float(rec22),
    }
    return res


def check_lemma2_shear(sol: CellSolution, g: CellGeometry, lines: TransversalLines,
                       m: IsotropicModuli) -> LemmaResiduals:
    """Reconstruct xi12 including the trace-derivative line terms."""
    if not lines.applicable:
        raise NotApplicableError("no transversal lines in this cell")
    row, col = find_derivative_lines(g)
    if row is None or col is None:
        raise NotApplicableError("derivative stencil blocked on every line")
    avg = average_stress(sol, g)
    anchor_x = (col + 0.5) * g.hx
    anchor_y = (row + 0.5) * g.hy
    d1 = trace_derivative_line_integral(sol, g, "horizontal", row, anchor=anchor_x)
    d2 = trace_derivative_line_integral(sol, g, "vertical", col, anchor=anchor_y)
    rec12 = avg[2] / (2.0 * m.G) + 0.125 * (1.0 / m.K + 1.0 / m.G) * (d1 + d2)
    scale = _xi_scale(sol)
    res = LemmaResiduals(scale=scale)
    res.lines_used = {"row": row, "col": col}
    res.lemma2_shear = {
        "xi12": abs(sol.quasiperiod.xi12 - rec12) / scale,
        "xi12_reconstructed": float(rec12),
    }
    return res
