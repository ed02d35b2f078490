"""Hot kernels for the matrix-free stiffness apply.

A compiled Cython extension is used when available; otherwise a vectorized
NumPy fallback with identical semantics is selected.  Set VIGCELL_FORCE_PURE=1
to force the fallback (used by the benchmark and the kernel tests).
"""

import os

from . import pure

if os.environ.get("VIGCELL_FORCE_PURE"):
    apply_stiffness = pure.apply_stiffness
    BACKEND = "pure"
else:
    try:
        from ._fast import apply_stiffness

        BACKEND = "compiled"
    except ImportError:  # extension not built
        apply_stiffness = pure.apply_stiffness
        BACKEND = "pure"
