"""Periodic homogenization of perforated pixel cells in planar elasticity.

Computes effective moduli (K*, G*, G45*) of square symmetric perforated
structures, extracts the Vigdergauz geometric constants A1, A2, A3 by
several independent routes, and numerically checks the line-average and
quasiperiod identities they rest on.
"""

from .errors import (
    NotApplicableError,
    SolverError,
    SymmetryError,
    ValidationError,
)
from .geometry import (
    CellGeometry,
    TransversalLines,
    find_transversal_lines,
    is_square_symmetric_geometry,
    parse_cell,
    replicate,
    serialize_cell,
    volume_fraction,
)
from .material import (
    IsotropicModuli,
    compliance_matrix,
    hooke_matrix,
    moduli_from_compliance,
)
from .fem import (
    CellSolution,
    Quasiperiod,
    SolverOptions,
    average_stress,
    line_average_stress,
    solve_cell_problem,
    trace_derivative_line_integral,
)
from .homogenization import (
    EffectiveTensor,
    MacroStress,
    effective_tensor,
    hydrostatic_and_shear_loadings,
    solve_stress_controlled,
)
from .vigdergauz import (
    IndependenceReport,
    VigdergauzConstants,
    compliance_eigenvalues,
    constant_a3_derivative,
    constants_closed_form,
    constants_line_integral,
    hs_bound_margin,
    independence_report,
)
from .verify import (
    LemmaResiduals,
    check_lemma1,
    check_lemma2_normal,
    check_lemma2_shear,
)

__version__ = "0.1.0"
