"""Sparse GF(2) boundary matrices and the graph encodings derived from them.

The boundary matrix is stored column-wise: column j lists the ranks of the
codimension-1 faces of the cell with rank j. Rows are kept in a padded
(n, 4) array because a column holds 0, 2, or 4 entries.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .cubical import CubicalComplex, Filtration
from .errors import InternalError


@dataclass(frozen=True)
class BoundaryMatrix:
    """Strictly upper-triangular incidence matrix in filtration order."""

    n: int
    face_ranks: np.ndarray  # (n, 4) int64, -1 padded, sorted ascending per column
    birth_value: np.ndarray  # grey value per rank
    cell_dim: np.ndarray  # cell dimension per rank

    def column(self, j: int) -> list[int]:
        return [int(r) for r in self.face_ranks[j] if r >= 0]

    def columns(self) -> list[list[int]]:
        return [self.column(j) for j in range(self.n)]

    def nnz(self) -> int:
        return int((self.face_ranks >= 0).sum())

    def dense(self) -> np.ndarray:
        """0/1 matrix for small test fixtures only."""
        m = np.zeros((self.n, self.n), dtype=np.uint8)
        for j in range(self.n):
            for i in self.column(j):
                m[i, j] = 1
        return m


def build_boundary_matrix(f: Filtration) -> BoundaryMatrix:
    """Assemble the codimension-1 incidence columns in filtration order."""
    O = f.order
    n = f.n
    fr = np.full((n, 4), -1, dtype=np.int64)

    # vertical edges (odd row, even col): faces are the vertices above/below
    ev = O[1::2, 0::2].ravel()
    if ev.size:
        up = O[0:-1:2, 0::2].ravel()
        down = O[2::2, 0::2].ravel()
        fr[ev, :2] = np.sort(np.stack([up, down], axis=1), axis=1)

    # horizontal edges (even row, odd col): faces left/right
    eh = O[0::2, 1::2].ravel()
    if eh.size:
        left = O[0::2, 0:-1:2].ravel()
        right = O[0::2, 2::2].ravel()
        fr[eh, :2] = np.sort(np.stack([left, right], axis=1), axis=1)

    # squares (odd, odd): faces are the four surrounding edges
    sq = O[1::2, 1::2].ravel()
    if sq.size:
        e_up = O[0:-1:2, 1::2].ravel()
        e_down = O[2::2, 1::2].ravel()
        e_left = O[1::2, 0:-1:2].ravel()
        e_right = O[1::2, 2::2].ravel()
        fr[sq] = np.sort(np.stack([e_up, e_down, e_left, e_right], axis=1), axis=1)

    return BoundaryMatrix(n, fr, f.values_by_rank, f.dims_by_rank)


@dataclass(frozen=True)
class CellGraph:
    """Weighted graph over cells, for export to graph-learning consumers.

    ``node_features`` is an optional (n, 3) array of (dimension, grey value,
    0-based rank); rank is -1 when no filtration was supplied.
    """

    n: int
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    directed: bool
    node_features: np.ndarray | None = None

    def degree(self, node: int) -> int:
        if self.directed:
            return int((self.src == node).sum())
        return int((self.src == node).sum() + (self.dst == node).sum())


def _sorted_edges(src, dst, weight):
    order = np.lexsort((dst, src))
    return src[order], dst[order], weight[order]


def symmetrize(b: BoundaryMatrix) -> CellGraph:
    """Undirected incidence graph of B + B^T: nodes are ranks, edges join
    each cell to its codimension-1 faces. Self-loop-free by construction."""
    mask = b.face_ranks >= 0
    dst = np.repeat(np.arange(b.n, dtype=np.int64), mask.sum(axis=1))
    src = b.face_ranks[mask]
    weight = np.ones(src.size, dtype=np.float64)
    src, dst, weight = _sorted_edges(src, dst, weight)
    feats = np.column_stack(
        [b.cell_dim.astype(np.float64), b.birth_value, np.arange(b.n, dtype=np.float64)]
    )
    return CellGraph(b.n, src, dst, weight, directed=False, node_features=feats)


def _grid_graph(weights: np.ndarray, cc: CubicalComplex, f: Filtration | None) -> CellGraph:
    """Directed graph over cell-grid positions. Every node carries its own
    weight as a self-loop and points at each grid-adjacent cell (its faces
    and cofaces) with the target cell's weight."""
    rows, cols = weights.shape
    n = rows * cols
    wf = weights.ravel()
    idx = np.arange(n, dtype=np.int64).reshape(rows, cols)

    srcs = [np.arange(n, dtype=np.int64)]
    dsts = [np.arange(n, dtype=np.int64)]
    for a, bgrid in (
        (idx[:, :-1], idx[:, 1:]),
        (idx[:, 1:], idx[:, :-1]),
        (idx[:-1, :], idx[1:, :]),
        (idx[1:, :], idx[:-1, :]),
    ):
        srcs.append(a.ravel())
        dsts.append(bgrid.ravel())
    src = np.concatenate(srcs)
    dst = np.concatenate(dsts)
    weight = wf[dst]
    src, dst, weight = _sorted_edges(src, dst, weight)

    dims = cc.cell_dims.ravel().astype(np.float64)
    ranks = f.order.ravel().astype(np.float64) if f is not None else np.full(n, -1.0)
    feats = np.column_stack([dims, cc.cell_values.ravel(), ranks])
    return CellGraph(n, src, dst, weight, directed=True, node_features=feats)


def export_cc_graph(cc: CubicalComplex, filtration: Filtration | None = None) -> CellGraph:
    """Graph encoding of the extended-value (CC) matrix."""
    return _grid_graph(cc.cell_values, cc, filtration)


def fcc_weight_matrix(cc: CubicalComplex, f: Filtration) -> np.ndarray:
    """Compose the rank grid with the value grid: entry (i, j) is the
    extended grey value of the cell whose rank sits at (i, j), reading the
    value grid in row-major flattening."""
    flat = f.order.ravel()
    if flat.min() < 0 or flat.max() >= cc.n_cells:
        raise InternalError("rank grid entries out of range for the value grid")
    return cc.cell_values.ravel()[f.order]


def export_fcc_graph(cc: CubicalComplex, f: Filtration) -> CellGraph:
    """Graph encoding of the rank-composed (FCC) matrix."""
    return _grid_graph(fcc_weight_matrix(cc, f), cc, f)


def write_edge_list(graph: CellGraph, path) -> None:
    """Text edge list: header line ``nodes=<n>``, then ``src dst weight``
    triples with zero-based node ids."""
    with open(path, "w") as fh:
        fh.write(f"nodes={graph.n}\n")
        for s, d, w in zip(graph.src, graph.dst, graph.weight):
            fh.write(f"{int(s)} {int(d)} {repr(float(w))}\n")


def write_node_features(graph: CellGraph, path) -> None:
    """Optional per-node CSV: node id, dimension, grey value, 1-based rank
    (0 when the graph was built without a filtration)."""
    if graph.node_features is None:
        raise InternalError("graph carries no node features")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["node", "dim", "value", "rank"])
        for node in range(graph.n):
            dim, value, rank = graph.node_features[node]
            w.writerow([node, int(dim), repr(float(value)), int(rank) + 1])


def write_boundary_triplets(b: BoundaryMatrix, path) -> None:
    """Debug dump: one ``row col 1`` line per nonzero, zero-based."""
    with open(path, "w") as fh:
        for j in range(b.n):
            for i in b.column(j):
                fh.write(f"{i} {j} 1\n")
