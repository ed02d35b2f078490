"""Benchmark the compiled stiffness-apply kernel against the NumPy fallback.

Times the raw matvec on meshes of increasing size and a full effective-tensor
computation with each backend.  Run from the repository root:

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

import vigcell as vc
from vigcell import kernels
from vigcell.fem import Mesh, element_stiffness
from vigcell.kernels import pure
from vigcell.material import hooke_matrix


def backends():
    out = [("pure", pure.apply_stiffness)]
    try:
        from vigcell.kernels import _fast

        out.append(("compiled", _fast.apply_stiffness))
    except ImportError:
        print("compiled extension not available; benchmarking fallback only")
    return out


def lattice(n):
    mask = np.ones((n, n), dtype=bool)
    q = n // 4
    mask[q : 3 * q, q : 3 * q] = False
    return vc.CellGeometry(nx=n, ny=n, l1=1.0, l2=1.0, mask=mask)


def bench_matvec(reps=50):
    print("raw matvec (seconds per apply):")
    ke = element_stiffness(hooke_matrix(vc.IsotropicModuli(1.0, 1.0)), 0.01, 0.01)
    for n in (32, 64, 128, 256):
        mesh = Mesh(lattice(n))
        u = np.random.default_rng(0).standard_normal(mesh.ndof)
        out = np.empty(mesh.ndof)
        row = [f"  n={n:4d} ({mesh.n_elems:6d} elems)"]
        times = {}
        for name, fn in backends():
            fn(mesh.edofs, ke, u, out)  # warm up
            t0 = time.perf_counter()
            for _ in range(reps):
                fn(mesh.edofs, ke, u, out)
            times[name] = (time.perf_counter() - t0) / reps
            row.append(f"{name} {times[name] * 1e3:8.3f} ms")
        if len(times) == 2:
            row.append(f"speedup {times['pure'] / times['compiled']:.1f}x")
        print("  ".join(row))


def bench_effective():
    print("full effective-tensor solve at 128x128 (3 cell problems):")
    g = lattice(128)
    m = vc.IsotropicModuli(1.0, 1.0)
    for name, fn in backends():
        saved = kernels.apply_stiffness
        kernels.apply_stiffness = fn
        try:
            vc.effective_tensor(g, m)  # warm up
            t0 = time.perf_counter()
            vc.effective_tensor(g, m)
            dt = time.perf_counter() - t0
        finally:
            kernels.apply_stiffness = saved
        print(f"  {name:8s} {dt:6.2f} s")


if __name__ == "__main__":
    print(f"selected backend at import: {kernels.BACKEND}")
    bench_matvec()
    bench_effective()
