"""Grey-value-extended cubical complexes and their filtration orders.

A height x width image becomes a (2*height-1) x (2*width-1) cell grid:
even/even positions are vertices (the pixels), positions with exactly one
odd coordinate are edges, odd/odd positions are squares. A cell's value is
the maximum grey value over the vertices in its closure, so the sublevel
sets of the extended grid are closed subcomplexes.

Ranks are 0-based in memory. Rank grids are written to CSV 1-based, which
is the layout conventionally printed for these matrices; caller-supplied
explicit orders use the same 1-based convention.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError, InvalidOrderError
from .ingest import GreyImage

VERTEX, EDGE, SQUARE = 0, 1, 2


def _as_grid(img) -> np.ndarray:
    if isinstance(img, GreyImage):
        return img.values
    grid = np.asarray(img, dtype=np.float64)
    if grid.ndim != 2 or grid.size == 0:
        raise DomainError(f"expected a nonempty 2D image, got shape {grid.shape}")
    return grid


def cell_dimensions(rows: int, cols: int) -> np.ndarray:
    """Dimension of each cell in the grid: (i % 2) + (j % 2)."""
    i = np.arange(rows)[:, None] % 2
    j = np.arange(cols)[None, :] % 2
    return (i + j).astype(np.uint8)


@dataclass(frozen=True)
class CubicalComplex:
    """Extended grey values and dimensions over the cell grid."""

    cell_values: np.ndarray
    cell_dims: np.ndarray

    @property
    def rows(self) -> int:
        return self.cell_values.shape[0]

    @property
    def cols(self) -> int:
        return self.cell_values.shape[1]

    @property
    def n_cells(self) -> int:
        return self.cell_values.size

    def faces(self, i: int, j: int) -> list[tuple[int, int]]:
        """Codimension-1 faces of the cell at grid position (i, j)."""
        odd_i, odd_j = i % 2, j % 2
        if odd_i and odd_j:
            return [(i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)]
        if odd_i:
            return [(i - 1, j), (i + 1, j)]
        if odd_j:
            return [(i, j - 1), (i, j + 1)]
        return []


def build_cubical_complex(img) -> CubicalComplex:
    """Extend an image's grey values to the full cell grid by taking maxima.

    Accepts a GreyImage or any 2D array (test fixtures use small unnormalized
    integer grids). Vertices copy the pixel values, edges take the max of
    their two endpoints, squares the max of their four corners.
    """
    v = _as_grid(img)
    h, w = v.shape
    grid = np.empty((2 * h - 1, 2 * w - 1), dtype=np.float64)
    grid[0::2, 0::2] = v
    grid[0::2, 1::2] = np.maximum(v[:, :-1], v[:, 1:])
    grid[1::2, 0::2] = np.maximum(v[:-1, :], v[1:, :])
    grid[1::2, 1::2] = np.maximum(
        np.maximum(v[:-1, :-1], v[:-1, 1:]),
        np.maximum(v[1:, :-1], v[1:, 1:]),
    )
    return CubicalComplex(grid, cell_dimensions(*grid.shape))


@dataclass(frozen=True)
class Filtration:
    """A total cell order compatible with faces and grey values.

    ``order[i, j]`` is the 0-based rank of the cell at (i, j);
    ``rank_to_cell[r]`` is the flat row-major cell index holding rank r.
    """

    complex: CubicalComplex
    order: np.ndarray
    rank_to_cell: np.ndarray

    @property
    def n(self) -> int:
        return self.rank_to_cell.size

    @cached_property
    def values_by_rank(self) -> np.ndarray:
        return self.complex.cell_values.ravel()[self.rank_to_cell]

    @cached_property
    def dims_by_rank(self) -> np.ndarray:
        return self.complex.cell_dims.ravel()[self.rank_to_cell]

    def rank_grid_one_based(self) -> np.ndarray:
        return self.order + 1


def build_filtration(cc: CubicalComplex, order: np.ndarray | None = None) -> Filtration:
    """Order the cells of a complex.

    With ``order=None`` the canonical rule sorts by (grey value, dimension,
    row-major index), which satisfies both filtration invariants by
    construction and is deterministic. Otherwise ``order`` is an explicit
    1-based rank grid (as printed), validated against both invariants.
    """
    if order is None:
        values = cc.cell_values.ravel()
        dims = cc.cell_dims.ravel()
        idx = np.arange(values.size)
        rank_to_cell = np.lexsort((idx, dims, values))
        ranks = np.empty(values.size, dtype=np.int64)
        ranks[rank_to_cell] = idx
        return Filtration(cc, ranks.reshape(cc.cell_values.shape), rank_to_cell)

    order = np.asarray(order, dtype=np.int64)
    if order.shape != cc.cell_values.shape:
        raise InvalidOrderError(
            f"order grid shape {order.shape} != cell grid {cc.cell_values.shape}",
            pair=None,
        )
    ranks = order - 1
    flat = ranks.ravel()
    if sorted(flat.tolist()) != list(range(flat.size)):
        raise InvalidOrderError("order grid is not a permutation of 1..N", pair=None)
    rank_to_cell = np.empty(flat.size, dtype=np.int64)
    rank_to_cell[flat] = np.arange(flat.size)
    f = Filtration(cc, ranks, rank_to_cell)
    validate_filtration(f)
    return f


def validate_filtration(f: Filtration) -> None:
    """Raise InvalidOrderError unless both filtration invariants hold.

    Faces-first: every codimension-1 face precedes its cell. Grey-monotone:
    a cell with strictly smaller value precedes any cell with larger value
    (equivalently, values are nondecreasing along the rank order).
    """
    cc = f.complex
    cols = cc.cols
    values = f.values_by_rank
    drop = np.nonzero(values[1:] < values[:-1])[0]
    if drop.size:
        r = int(drop[0])
        a = int(f.rank_to_cell[r])
        b = int(f.rank_to_cell[r + 1])
        pair = (divmod(a, cols), divmod(b, cols))
        raise InvalidOrderError(
            f"value decreases along the order: cell {pair[0]} (rank {r + 1}, value "
            f"{values[r]:g}) precedes cell {pair[1]} (value {values[r + 1]:g})",
            pair=pair,
        )
    for i in range(cc.rows):
        for j in range(cc.cols):
            r = f.order[i, j]
            for fi, fj in cc.faces(i, j):
                if f.order[fi, fj] > r:
                    raise InvalidOrderError(
                        f"face ({fi}, {fj}) has rank {int(f.order[fi, fj]) + 1} after "
                        f"its cell ({i}, {j}) at rank {int(r) + 1}",
                        pair=((fi, fj), (i, j)),
                    )


def write_value_grid(cc: CubicalComplex, path) -> None:
    """CC matrix as a CSV grid of extended grey values."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for row in cc.cell_values:
            w.writerow([repr(float(x)) for x in row])


def write_rank_grid(f: Filtration, path) -> None:
    """FCC matrix as a CSV grid of 1-based ranks."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for row in f.rank_grid_one_based():
            w.writerow([int(x) for x in row])
