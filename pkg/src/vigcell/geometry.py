"""Pixel-cell geometries: parsing, validation, and line/symmetry queries.

A cell is an nx x ny grid of square elements on a rectangle of physical
size l1 x l2.  True entries in the mask are material, False entries are
holes.  The mask is stored as ``mask[row, col]`` with row 0 at the bottom
of the cell; the periodic extension wraps across both pairs of faces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class CellGeometry:
    nx: int
    ny: int
    l1: float
    l2: float
    mask: np.ndarray  # (ny, nx) bool, row 0 = bottom

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ValidationError("cell needs at least 2 elements per axis")
        if not (self.l1 > 0 and self.l2 > 0):
            raise ValidationError("periods l1, l2 must be positive")
        mask = np.asarray(self.mask, dtype=bool)
        if mask.shape != (self.ny, self.nx):
            raise ValidationError(
                f"mask shape {mask.shape} does not match ny={self.ny}, nx={self.nx}"
            )
        if not mask.any():
            raise ValidationError("mask contains no material element")
        if not _periodically_connected(mask):
            raise ValidationError("material elements are not periodically connected")
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)

    @property
    def hx(self) -> float:
        return self.l1 / self.nx

    @property
    def hy(self) -> float:
        return self.l2 / self.ny


@dataclass(frozen=True)
class TransversalLines:
    """Fully-material element rows/columns and the chosen mid-lines through them."""

    rows: tuple
    cols: tuple
    chosen_row: int | None
    chosen_col: int | None

    @property
    def applicable(self) -> bool:
        return self.chosen_row is not None and self.chosen_col is not None


def _periodically_connected(mask: np.ndarray) -> bool:
    """Single edge-connected component of material, wrapping across faces."""
    ny, nx = mask.shape
    total = int(mask.sum())
    if total == 0:
        return False
    start = tuple(np.argwhere(mask)[0])
    seen = np.zeros_like(mask, dtype=bool)
    seen[start] = True
    stack = [start]
    count = 1
    while stack:
        j, i = stack.pop()
        for dj, di in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            jj = (j + dj) % ny
            ii = (i + di) % nx
            if mask[jj, ii] and not seen[jj, ii]:
                seen[jj, ii] = True
                count += 1
                stack.append((jj, ii))
    return count == total


def parse_cell(text: str) -> CellGeometry:
    """Parse the .cell format.

    Line 1 is ``nx ny l1 l2``; then ny rows of '#' (material) and '.' (hole),
    bottom row first.
    """
    lines = text.split("\n")
    if not lines or not lines[0].strip():
        raise ValidationError("malformed header: empty input")
    header = lines[0].split(" ")
    if len(header) != 4:
        raise ValidationError(f"malformed header: expected 4 fields, got {len(header)}")
    try:
        nx, ny = int(header[0]), int(header[1])
        l1, l2 = float(header[2]), float(header[3])
    except ValueError as exc:
        raise ValidationError(f"malformed header: {exc}") from None
    if nx <= 0 or ny <= 0:
        raise ValidationError("malformed header: nonpositive element counts")
    body = lines[1:]
    if len(body) < ny + 1 or any(body[ny:]) or (len(body) == ny):
        # final newline required: split leaves one trailing empty string
        raise ValidationError(f"expected {ny} mask rows followed by a final newline")
    mask = np.zeros((ny, nx), dtype=bool)
    for j in range(ny):
        row = body[j]
        if len(row) != nx:
            raise ValidationError(f"mask row {j} has length {len(row)}, expected {nx}")
        bad = set(row) - {"#", "."}
        if bad:
            raise ValidationError(f"mask row {j} contains invalid characters {sorted(bad)}")
        mask[j] = [c == "#" for c in row]
    return CellGeometry(nx=nx, ny=ny, l1=l1, l2=l2, mask=mask)


def serialize_cell(g: CellGeometry) -> str:
    """Canonical .cell text; inverse of parse_cell on canonical input."""
    rows = ["".join("#" if v else "." for v in g.mask[j]) for j in range(g.ny)]
    return f"{g.nx} {g.ny} {g.l1!r} {g.l2!r}\n" + "\n".join(rows) + "\n"


def volume_fraction(g: CellGeometry) -> float:
    return float(g.mask.sum()) / (g.nx * g.ny)


def _choose_nearest_center(indices, n):
    """Index whose element mid-point is nearest n/2; ties toward the smaller index."""
    if not indices:
        return None
    return min(indices, key=lambda k: (abs(k + 0.5 - n / 2), k))


def find_transversal_lines(g: CellGeometry) -> TransversalLines:
    rows = tuple(int(j) for j in range(g.ny) if g.mask[j].all())
    cols = tuple(int(i) for i in range(g.nx) if g.mask[:, i].all())
    return TransversalLines(
        rows=rows,
        cols=cols,
        chosen_row=_choose_nearest_center(rows, g.ny),
        chosen_col=_choose_nearest_center(cols, g.nx),
    )


def _max_margin_line(full: list, n: int):
    """Line with the largest wrapped distance to the nearest non-full line.

    The cross-line derivative stencil samples the two neighbor lines, so the
    stencil line should sit as far as possible from hole boundaries, where
    stress gradients concentrate.  Ties go toward the cell center, then the
    smaller index.
    """
    full_set = set(full)
    candidates = [j for j in full
                  if (j + 1) % n in full_set and (j - 1) % n in full_set]
    if not candidates:
        return None
    if len(full_set) == n:  # no holes on this axis: fall back to the center rule
        return _choose_nearest_center(candidates, n)

    def margin(j):
        d = 1
        while (j + d) % n in full_set and (j - d) % n in full_set:
            d += 1
        return d

    return min(candidates, key=lambda j: (-margin(j), abs(j + 0.5 - n / 2), j))


def find_derivative_lines(g: CellGeometry) -> tuple[int | None, int | None]:
    """Fully-material row/column whose both neighbors are also fully material,
    placed as far from holes as possible."""
    full_rows = [j for j in range(g.ny) if g.mask[j].all()]
    full_cols = [i for i in range(g.nx) if g.mask[:, i].all()]
    return _max_margin_line(full_rows, g.ny), _max_margin_line(full_cols, g.nx)


def is_square_symmetric_geometry(g: CellGeometry) -> bool:
    """True iff the mask is invariant under 90-degree rotation about the center."""
    if g.nx != g.ny or g.l1 != g.l2:
        raise ValidationError("not testable by rotation: cell is not square")
    return bool(np.array_equal(g.mask, np.rot90(g.mask)))


def replicate(g: CellGeometry, k: int) -> CellGeometry:
    """Split every element into k x k elements; the continuum geometry is unchanged."""
    if k < 1:
        raise ValidationError("replication factor must be >= 1")
    if k == 1:
        return g
    mask = np.repeat(np.repeat(g.mask, k, axis=0), k, axis=1)
    return CellGeometry(nx=g.nx * k, ny=g.ny * k, l1=g.l1, l2=g.l2, mask=mask)


def random_symmetric_geometry(n: int, rng: np.random.Generator, max_tries: int = 200) -> CellGeometry:
    """Random connected, 90-degree symmetric n x n mask on the unit cell.

    Rectangular holes are drawn at random and unioned with their rotations so
    the result stays square symmetric; draws are retried until the material is
    periodically connected.
    """
    for _ in range(max_tries):
        holes = np.zeros((n, n), dtype=bool)
        for _ in range(int(rng.integers(1, 4))):
            w = int(rng.integers(2, max(3, n // 3)))
            h = int(rng.integers(2, max(3, n // 3)))
            j = int(rng.integers(0, n - h))
            i = int(rng.integers(0, n - w))
            holes[j : j + h, i : i + w] = True
        for _ in range(3):
            holes |= np.rot90(holes)
        mask = ~holes
        if not mask.any() or mask.sum() < n * n // 3:
            continue
        if _periodically_connected(mask):
            return CellGeometry(nx=n, ny=n, l1=1.0, l2=1.0, mask=mask)
    raise ValidationError("failed to sample a connected symmetric mask")
