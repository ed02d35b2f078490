"""NumPy fallback kernels."""

import numpy as np


def apply_stiffness(edofs, ke, u, out):
    """out = K @ u for the element-wise stiffness, gathered/scattered per element.

    edofs: (ne, 8) int64 dof indices, ke: (8, 8), u/out: (ndof,).
    bincount accumulates in fixed index order, so the result is deterministic.
    """
    fe = u[edofs] @ ke
    out[:] = np.bincount(edofs.ravel(), weights=fe.ravel(), minlength=out.size)
