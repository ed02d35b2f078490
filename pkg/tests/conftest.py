import pathlib

import numpy as np
import pytest

import vigcell as vc

GEOM_DIR = pathlib.Path(__file__).resolve().parent.parent / "geometries"


def load_geometry(name: str) -> vc.CellGeometry:
    return vc.parse_cell((GEOM_DIR / name).read_text())


@pytest.fixture(scope="session")
def full8():
    return load_geometry("full8.cell")


@pytest.fixture(scope="session")
def lattice32():
    return load_geometry("lattice32.cell")


@pytest.fixture(scope="session")
def asym16():
    return load_geometry("asym16.cell")


@pytest.fixture(scope="session")
def staggered16():
    return load_geometry("staggered16.cell")


@pytest.fixture(scope="session")
def holed8():
    # 8x8 cell with a centered 4x4 hole, small enough for dense checks
    mask = np.ones((8, 8), dtype=bool)
    mask[2:6, 2:6] = False
    return vc.CellGeometry(nx=8, ny=8, l1=1.0, l2=1.0, mask=mask)


@pytest.fixture(scope="session")
def lattice32_unit_solves(lattice32):
    """Cached (effective, unit solves) for K=G=1 on the reference geometry."""
    m = vc.IsotropicModuli(1.0, 1.0)
    eff, sols = vc.effective_tensor(lattice32, m)
    return m, eff, sols
