import numpy as np
import pytest

import vigcell as vc
from vigcell.errors import ValidationError
from vigcell.geometry import (
    _periodically_connected,
    find_derivative_lines,
    random_symmetric_geometry,
)


def test_parse_serialize_roundtrip():
    # canonical form: serialize(parse(text)) == text byte for byte
    import pathlib

    geom_dir = pathlib.Path(__file__).resolve().parent.parent / "geometries"
    for name in ("full8.cell", "lattice32.cell", "asym16.cell", "staggered16.cell"):
        raw = (geom_dir / name).read_text()
        assert vc.serialize_cell(vc.parse_cell(raw)) == raw


def test_parse_header_diagnostics():
    with pytest.raises(ValidationError, match="header"):
        vc.parse_cell("")
    with pytest.raises(ValidationError, match="4 fields"):
        vc.parse_cell("4 4 1.0\n####\n####\n####\n####\n")
    with pytest.raises(ValidationError, match="header"):
        vc.parse_cell("four 4 1.0 1.0\n####\n####\n####\n####\n")
    with pytest.raises(ValidationError, match="nonpositive"):
        vc.parse_cell("0 4 1.0 1.0\n")


def test_parse_body_diagnostics():
    with pytest.raises(ValidationError, match="final newline"):
        vc.parse_cell("2 2 1.0 1.0\n##\n##")
    with pytest.raises(ValidationError, match="length"):
        vc.parse_cell("3 2 1.0 1.0\n###\n##\n")
    with pytest.raises(ValidationError, match="invalid characters"):
        vc.parse_cell("2 2 1.0 1.0\n#x\n##\n")
    with pytest.raises(ValidationError, match="2 mask rows"):
        vc.parse_cell("2 2 1.0 1.0\n##\n")


def test_parse_row_order_bottom_first():
    g = vc.parse_cell("2 2 1.0 1.0\n##\n.#\n")
    # first body line is the bottom row of the mask
    assert g.mask[0].all()
    assert not g.mask[1, 0] and g.mask[1, 1]


def test_geometry_validation():
    with pytest.raises(ValidationError, match="at least 2"):
        vc.CellGeometry(1, 4, 1.0, 1.0, np.ones((4, 1), dtype=bool))
    with pytest.raises(ValidationError, match="positive"):
        vc.CellGeometry(4, 4, -1.0, 1.0, np.ones((4, 4), dtype=bool))
    with pytest.raises(ValidationError, match="shape"):
        vc.CellGeometry(4, 4, 1.0, 1.0, np.ones((4, 5), dtype=bool))
    with pytest.raises(ValidationError, match="no material"):
        vc.CellGeometry(4, 4, 1.0, 1.0, np.zeros((4, 4), dtype=bool))


def test_connectivity_rejects_checkerboard():
    jj, ii = np.mgrid[0:4, 0:4]
    mask = (jj + ii) % 2 == 0  # diagonal contact only
    assert not _periodically_connected(mask)
    with pytest.raises(ValidationError, match="connected"):
        vc.CellGeometry(4, 4, 1.0, 1.0, mask)


def test_connectivity_wraps_across_faces():
    mask = np.zeros((4, 4), dtype=bool)
    mask[:, 0] = True
    mask[:, 3] = True  # touches column 0 only through the periodic wrap
    assert _periodically_connected(mask)


def test_volume_fraction(lattice32, full8):
    assert vc.volume_fraction(full8) == 1.0
    assert vc.volume_fraction(lattice32) == 0.75


def test_transversal_lines_full(full8):
    lines = vc.find_transversal_lines(full8)
    assert lines.rows == tuple(range(8))
    assert lines.applicable
    # nearest-center with tie toward the smaller index
    assert lines.chosen_row == 3 and lines.chosen_col == 3


def test_transversal_lines_lattice(lattice32):
    lines = vc.find_transversal_lines(lattice32)
    hole_rows = set(range(8, 24))
    assert set(lines.rows) == set(range(32)) - hole_rows
    assert lines.chosen_row in lines.rows
    # nearest full row to the center 16.0 is row 24 (mid-point 24.5)... or 7 (7.5)
    assert lines.chosen_row == 7


def test_no_transversal_lines(staggered16):
    lines = vc.find_transversal_lines(staggered16)
    assert lines.rows == () and lines.cols == ()
    assert not lines.applicable


def test_derivative_lines_max_margin():
    # single hole row at j=5: eligible rows need both neighbors full, and the
    # pick should sit as far from row 5 as the wrap allows
    mask = np.ones((12, 12), dtype=bool)
    mask[5, 4] = False
    g = vc.CellGeometry(12, 12, 1.0, 1.0, mask)
    row, col = find_derivative_lines(g)
    assert row == 11  # wrapped distance 6 from the hole row
    assert col is not None


def test_derivative_lines_full_cell(full8):
    row, col = find_derivative_lines(full8)
    assert row == 3 and col == 3  # center rule when there are no holes


def test_derivative_lines_blocked(staggered16):
    assert find_derivative_lines(staggered16) == (None, None)


def test_square_symmetry_checks(lattice32, asym16, staggered16):
    assert vc.is_square_symmetric_geometry(lattice32)
    assert vc.is_square_symmetric_geometry(staggered16)
    assert not vc.is_square_symmetric_geometry(asym16)
    g = vc.CellGeometry(4, 6, 1.0, 1.0, np.ones((6, 4), dtype=bool))
    with pytest.raises(ValidationError, match="not square"):
        vc.is_square_symmetric_geometry(g)


def test_replicate(lattice32):
    g2 = vc.replicate(lattice32, 2)
    assert (g2.nx, g2.ny) == (64, 64)
    assert g2.l1 == lattice32.l1
    assert vc.volume_fraction(g2) == vc.volume_fraction(lattice32)
    assert np.array_equal(g2.mask[::2, ::2], lattice32.mask)
    assert vc.replicate(lattice32, 1) is lattice32
    with pytest.raises(ValidationError):
        vc.replicate(lattice32, 0)


def test_random_symmetric_geometry_properties():
    rng = np.random.default_rng(7)
    for _ in range(5):
        g = random_symmetric_geometry(16, rng)
        assert vc.is_square_symmetric_geometry(g)
        assert _periodically_connected(g.mask)


def test_random_symmetric_geometry_deterministic():
    a = random_symmetric_geometry(16, np.random.default_rng(3))
    b = random_symmetric_geometry(16, np.random.default_rng(3))
    assert np.array_equal(a.mask, b.mask)
