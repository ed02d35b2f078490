"""Periodic cell problem on the pixel grid.

Discretization: 4-node bilinear quadrilaterals of uniform size (l1/nx, l2/ny),
2x2 Gauss quadrature, hole elements removed.  The displacement is split as
u = xi*x + v with v cell-periodic; opposite-face nodes share one unknown and
the affine part enters through a constant element load.  Traction-free hole
boundaries are implied by the energy formulation.

The translation nullspace is removed by keeping v mean-zero per component
over the material nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from . import kernels
from .errors import NotApplicableError, SolverError
from .geometry import CellGeometry
from .material import IsotropicModuli, hooke_matrix

_G = 1.0 / np.sqrt(3.0)  # 2-point Gauss abscissa on [-1, 1]
# local node order: (0,0), (1,0), (1,1), (0,1) in element coordinates
_XI_N = np.array([-1.0, 1.0, 1.0, -1.0])
_ETA_N = np.array([-1.0, -1.0, 1.0, 1.0])


@dataclass(frozen=True)
class Quasiperiod:
    """Symmetric macroscopic strain; the quasiperiod of u = xi*x + periodic."""

    xi11: float = 0.0
    xi22: float = 0.0
    xi12: float = 0.0

    def as_vector(self) -> np.ndarray:
        """Voigt vector (xi11, xi22, 2*xi12) with engineering shear."""
        return np.array([self.xi11, self.xi22, 2.0 * self.xi12])

    @staticmethod
    def from_vector(vec) -> "Quasiperiod":
        return Quasiperiod(float(vec[0]), float(vec[1]), 0.5 * float(vec[2]))


@dataclass
class SolverOptions:
    rel_tolerance: float = 1e-10
    max_iterations: int | None = None  # default 20 * n_unknowns
    use_oracle: bool = False

    def __post_init__(self):
        if not (0.0 < self.rel_tolerance < 1.0):
            raise ValueError("rel_tolerance must be in (0, 1)")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


def b_matrix(xi: float, eta: float, hx: float, hy: float) -> np.ndarray:
    """Strain-displacement matrix (3x8) at local point (xi, eta) in [-1,1]^2."""
    dndx = 0.25 * _XI_N * (1.0 + eta * _ETA_N) * (2.0 / hx)
    dndy = 0.25 * _ETA_N * (1.0 + xi * _XI_N) * (2.0 / hy)
    b = np.zeros((3, 8))
    b[0, 0::2] = dndx
    b[1, 1::2] = dndy
    b[2, 0::2] = dndy
    b[2, 1::2] = dndx
    return b


def gauss_b_matrices(hx: float, hy: float) -> np.ndarray:
    """B at the four 2x2 Gauss points, shape (4, 3, 8)."""
    return np.array([b_matrix(xi, eta, hx, hy) for xi, eta in
                     [(-_G, -_G), (_G, -_G), (_G, _G), (-_G, _G)]])


def element_stiffness(c: np.ndarray, hx: float, hy: float) -> np.ndarray:
    bs = gauss_b_matrices(hx, hy)
    w = hx * hy / 4.0
    ke = np.zeros((8, 8))
    for b in bs:
        ke += w * b.T @ c @ b
    return ke


class Mesh:
    """Periodic node numbering and dof maps for the material elements."""

    def __init__(self, g: CellGeometry):
        self.g = g
        nx, ny = g.nx, g.ny
        ey, ex = np.nonzero(g.mask)  # row-major: fixed element order
        self.elems = np.column_stack([ex, ey]).astype(np.int64)
        exp = (ex + 1) % nx
        eyp = (ey + 1) % ny
        enodes = np.column_stack([
            ey * nx + ex,
            ey * nx + exp,
            eyp * nx + exp,
            eyp * nx + ex,
        ])
        self.active_nodes = np.unique(enodes)
        node_index = np.full(nx * ny, -1, dtype=np.int64)
        node_index[self.active_nodes] = np.arange(self.active_nodes.size)
        self.node_index = node_index
        local = node_index[enodes]
        self.edofs = np.empty((enodes.shape[0], 8), dtype=np.int64)
        self.edofs[:, 0::2] = 2 * local
        self.edofs[:, 1::2] = 2 * local + 1
        self.ndof = 2 * self.active_nodes.size
        elem_index = np.full((ny, nx), -1, dtype=np.int64)
        elem_index[ey, ex] = np.arange(ey.size)
        self.elem_index = elem_index

    @property
    def n_elems(self) -> int:
        return self.elems.shape[0]


@dataclass
class CellSolution:
    quasiperiod: Quasiperiod
    moduli: IsotropicModuli
    fluctuation: np.ndarray  # (ny, nx, 2), zero at nodes not touching material
    stress: np.ndarray  # (ne, 4, 3) Voigt at 2x2 Gauss points
    strain: np.ndarray  # (ne, 4, 3)
    energy: float
    solver_stats: dict
    mesh: Mesh = field(repr=False)

    def dof_vector(self) -> np.ndarray:
        return self.fluctuation.reshape(-1, 2)[self.mesh.active_nodes].ravel()


def _project_translations(v: np.ndarray) -> None:
    v[0::2] -= v[0::2].mean()
    v[1::2] -= v[1::2].mean()


def _solve_direct(mesh: Mesh, ke: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Direct factorization oracle: assemble, pin one node, re-center."""
    ne = mesh.n_elems
    rows = np.repeat(mesh.edofs, 8, axis=1).ravel()
    cols = np.tile(mesh.edofs, (1, 8)).ravel()
    data = np.tile(ke.ravel(), ne)
    k = scipy.sparse.coo_matrix((data, (rows, cols)), shape=(mesh.ndof, mesh.ndof)).tocsc()
    keep = np.ones(mesh.ndof, dtype=bool)
    keep[[0, 1]] = False  # pin both dofs of the first material node
    v = np.zeros(mesh.ndof)
    v[keep] = scipy.sparse.linalg.spsolve(k[keep][:, keep], b[keep])
    _project_translations(v)
    return v


def _solve_cg(mesh: Mesh, ke: np.ndarray, b: np.ndarray, opts: SolverOptions):
    """Jacobi-preconditioned CG with translation projection, fixed sum order."""
    ndof = mesh.ndof
    diag = np.bincount(mesh.edofs.ravel(),
                       weights=np.tile(np.diag(ke), mesh.n_elems),
                       minlength=ndof)
    inv_diag = 1.0 / diag
    max_it = opts.max_iterations if opts.max_iterations is not None else 20 * ndof

    tmp = np.empty(ndof)

    def matvec(p):
        kernels.apply_stiffness(mesh.edofs, ke, p, tmp)
        return tmp

    x = np.zeros(ndof)
    norm_b = np.linalg.norm(b)
    r = b.copy()
    z = inv_diag * r
    _project_translations(z)
    d = z.copy()
    rz = float(r @ z)
    it = 0
    res = norm_b
    while res > opts.rel_tolerance * norm_b:
        if it >= max_it:
            raise SolverError(
                f"cg did not converge in {max_it} iterations "
                f"(relative residual {res / norm_b:.3e})"
            )
        q = matvec(d)
        dq = float(d @ q)
        if dq <= 0.0:
            raise SolverError("system not positive definite on the periodic space")
        alpha = rz / dq
        x += alpha * d
        if (it + 1) % 50 == 0:
            r = b - matvec(x)
        else:
            r -= alpha * q
        z = inv_diag * r
        _project_translations(z)
        rz_new = float(r @ z)
        d = z + (rz_new / rz) * d
        rz = rz_new
        res = np.linalg.norm(r)
        it += 1
    _project_translations(x)
    return x, it, res / norm_b


def solve_cell_problem(g: CellGeometry, m: IsotropicModuli, xi: Quasiperiod,
                       opts: SolverOptions | None = None) -> CellSolution:
    """Energy-minimizing periodic fluctuation for the prescribed quasiperiod."""
    opts = opts if opts is not None else SolverOptions()
    mesh = Mesh(g)
    c = hooke_matrix(m)
    hx, hy = g.hx, g.hy
    ke = element_stiffness(c, hx, hy)
    bs = gauss_b_matrices(hx, hy)
    w = hx * hy / 4.0
    xivec = xi.as_vector()

    fe = w * sum(b.T @ (c @ xivec) for b in bs)
    b_rhs = -np.bincount(mesh.edofs.ravel(),
                         weights=np.tile(fe, mesh.n_elems),
                         minlength=mesh.ndof)
    _project_translations(b_rhs)

    load_scale = np.linalg.norm(fe) * np.sqrt(mesh.n_elems)
    if np.linalg.norm(b_rhs) <= 1e-13 * load_scale or load_scale == 0.0:
        # homogeneous loading: the affine field is the exact minimizer
        v = np.zeros(mesh.ndof)
        stats = {"method": "trivial", "iterations": 0, "relative_residual": 0.0}
    elif opts.use_oracle:
        v = _solve_direct(mesh, ke, b_rhs)
        stats = {"method": "direct", "iterations": 0, "relative_residual": 0.0}
    else:
        v, it, res = _solve_cg(mesh, ke, b_rhs, opts)
        stats = {"method": "cg", "iterations": it, "relative_residual": res}

    ue = v[mesh.edofs]
    strain = np.einsum("gck,nk->ngc", bs, ue) + xivec
    stress = strain @ c.T
    energy = 0.5 * w * float(np.sum(stress * strain))

    fluct = np.zeros((g.ny * g.nx, 2))
    fluct[mesh.active_nodes] = v.reshape(-1, 2)
    return CellSolution(
        quasiperiod=xi,
        moduli=m,
        fluctuation=fluct.reshape(g.ny, g.nx, 2),
        stress=stress,
        strain=strain,
        energy=energy,
        solver_stats=stats,
        mesh=mesh,
    )


def combine_solutions(sols, coeffs) -> CellSolution:
    """Linear combination of solves sharing one geometry and moduli."""
    coeffs = np.asarray(coeffs, dtype=float)
    base = sols[0]
    g = base.mesh.g
    xivec = sum(c * s.quasiperiod.as_vector() for c, s in zip(coeffs, sols))
    fluct = sum(c * s.fluctuation for c, s in zip(coeffs, sols))
    strain = sum(c * s.strain for c, s in zip(coeffs, sols))
    stress = sum(c * s.stress for c, s in zip(coeffs, sols))
    w = g.hx * g.hy / 4.0
    energy = 0.5 * w * float(np.sum(stress * strain))
    iters = max(s.solver_stats.get("iterations", 0) for s in sols)
    return CellSolution(
        quasiperiod=Quasiperiod.from_vector(xivec),
        moduli=base.moduli,
        fluctuation=fluct,
        stress=stress,
        strain=strain,
        energy=energy,
        solver_stats={"method": "superposition", "iterations": iters,
                      "relative_residual": max(
                          s.solver_stats.get("relative_residual", 0.0) for s in sols)},
        mesh=base.mesh,
    )


def average_stress(sol: CellSolution, g: CellGeometry) -> np.ndarray:
    """Cell average |Y|^-1 int_Omega sigma dx; holes contribute zero."""
    w = g.hx * g.hy / 4.0
    return w * sol.stress.sum(axis=(0, 1)) / (g.l1 * g.l2)


def _line_points_stress(sol: CellSolution, g: CellGeometry, axis: str, index: int):
    """Stress at the 2-point Gauss nodes along a mid-line; returns (positions, sigma)."""
    mesh = sol.mesh
    c = hooke_matrix(sol.moduli)
    xivec = sol.quasiperiod.as_vector()
    v = sol.dof_vector()
    hx, hy = g.hx, g.hy
    if axis == "horizontal":
        if not g.mask[index % g.ny].all():
            raise NotApplicableError(f"line not transversal: row {index}")
        elems = mesh.elem_index[index % g.ny, :]
        b_line = np.array([b_matrix(-_G, 0.0, hx, hy), b_matrix(_G, 0.0, hx, hy)])
        pos = ((np.arange(g.nx)[:, None] + 0.5 + np.array([-_G, _G]) / 2.0) * hx).ravel()
    elif axis == "vertical":
        if not g.mask[:, index % g.nx].all():
            raise NotApplicableError(f"line not transversal: column {index}")
        elems = mesh.elem_index[:, index % g.nx]
        b_line = np.array([b_matrix(0.0, -_G, hx, hy), b_matrix(0.0, _G, hx, hy)])
        pos = ((np.arange(g.ny)[:, None] + 0.5 + np.array([-_G, _G]) / 2.0) * hy).ravel()
    else:
        raise ValueError(f"axis must be 'horizontal' or 'vertical', got {axis!r}")
    ue = v[mesh.edofs[elems]]
    strain = np.einsum("gck,nk->ngc", b_line, ue) + xivec
    sigma = (strain @ c.T).reshape(-1, 3)
    return pos, sigma


def line_average_stress(sol: CellSolution, g: CellGeometry, axis: str,
                        index: int) -> np.ndarray:
    """Average stress along the mid-line of a fully-material element row/column.

    Per-element 2-point Gauss quadrature; with uniform elements this is the
    plain mean over the Gauss nodes.
    """
    _, sigma = _line_points_stress(sol, g, axis, index)
    return sigma.mean(axis=0)


def trace_derivative_line_integral(sol: CellSolution, g: CellGeometry, axis: str,
                                   index: int, anchor: float = 0.0) -> float:
    """Line average of (d Tr sigma / d normal) * tangent coordinate.

    The normal derivative is the centered difference of Tr sigma between the
    mid-lines of the two adjacent element rows/columns; the tangent coordinate
    is measured from ``anchor`` (the chosen line intersection), wrapping
    periodically.
    """
    if axis == "horizontal":
        n, period, h = g.ny, g.l1, g.hy
        ok = g.mask[(index + 1) % n].all() and g.mask[(index - 1) % n].all()
    else:
        n, period, h = g.nx, g.l2, g.hx
        ok = g.mask[:, (index + 1) % g.nx].all() and g.mask[:, (index - 1) % g.nx].all()
    if not ok:
        raise NotApplicableError(f"derivative stencil blocked at {axis} line {index}")
    pos, sig_up = _line_points_stress(sol, g, axis, (index + 1) % (g.ny if axis == "horizontal" else g.nx))
    _, sig_dn = _line_points_stress(sol, g, axis, (index - 1) % (g.ny if axis == "horizontal" else g.nx))
    d_tr = (sig_up[:, 0] + sig_up[:, 1] - sig_dn[:, 0] - sig_dn[:, 1]) / (2.0 * h)
    t = (pos - anchor) % period
    return float(np.mean(d_tr * t))


def solution_dict(sol: CellSolution, g: CellGeometry) -> dict:
    """JSON-ready field dump."""
    return {
        "xi": list(sol.quasiperiod.as_vector()),
        "energy": sol.energy,
        "stress": sol.stress.tolist(),
        "strain": sol.strain.tolist(),
        "fluctuation": sol.fluctuation.tolist(),
    }
