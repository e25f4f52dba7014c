"""Independent brute-force ground truth for small instances.

Betti curves are computed without any boundary-matrix machinery: beta_0 by
union-find over the vertices of the growing sublevel complex, beta_1 from
the Euler characteristic (a 2D sublevel complex has no homology above
degree 1, so beta_1 = beta_0 - (V - E + S)). Tropical coordinates are
checked by exhaustive subset enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .cubical import build_cubical_complex
from .errors import OracleScopeError
from .reduction import DiagramSet


class UnionFind:
    """Plain union-find with path compression, tracking component count."""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.components = 0  # only counts elements activated via add()
        self._active = [False] * size

    def add(self, x: int) -> None:
        if not self._active[x]:
            self._active[x] = True
            self.components += 1

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra
            self.components -= 1


@dataclass(frozen=True)
class BettiCurves:
    thresholds: np.ndarray
    beta0: np.ndarray
    beta1: np.ndarray

    def at(self, t: float) -> tuple[int, int]:
        """Betti numbers at an arbitrary threshold (step function lookup)."""
        idx = int(np.searchsorted(self.thresholds, t, side="right")) - 1
        if idx < 0:
            return 0, 0
        return int(self.beta0[idx]), int(self.beta1[idx])


def betti_curve_bruteforce(img) -> BettiCurves:
    """Sweep the distinct grey values in increasing order, growing the
    sublevel complex cell by cell and reading off beta_0 / beta_1 after
    each threshold is complete."""
    cc = build_cubical_complex(img)
    values = cc.cell_values.ravel()
    dims = cc.cell_dims.ravel()
    cols = cc.cols
    order = np.argsort(values, kind="stable")

    uf = UnionFind(values.size)
    counts = [0, 0, 0]  # V, E, S
    thresholds = []
    beta0s = []
    beta1s = []

    def edge_endpoints(flat: int) -> tuple[int, int]:
        i, j = divmod(flat, cols)
        if i % 2 == 1:
            return flat - cols, flat + cols
        return flat - 1, flat + 1

    k = 0
    n = values.size
    while k < n:
        t = values[order[k]]
        while k < n and values[order[k]] == t:
            flat = int(order[k])
            dim = int(dims[flat])
            counts[dim] += 1
            if dim == 0:
                uf.add(flat)
            elif dim == 1:
                a, b = edge_endpoints(flat)
                uf.union(a, b)
            k += 1
        beta0 = uf.components
        euler = counts[0] - counts[1] + counts[2]
        thresholds.append(float(t))
        beta0s.append(beta0)
        beta1s.append(beta0 - euler)

    return BettiCurves(
        np.array(thresholds), np.array(beta0s, dtype=np.int64), np.array(beta1s, dtype=np.int64)
    )


def betti_curve_from_diagrams(d: DiagramSet, thresholds) -> BettiCurves:
    """Count half-open intervals [birth, death) containing each threshold;
    essential classes count whenever birth <= t."""
    thresholds = np.asarray(thresholds, dtype=np.float64)
    betas = {0: np.zeros(thresholds.size, dtype=np.int64), 1: np.zeros(thresholds.size, dtype=np.int64)}
    for degree in (0, 1):
        for p in d.diagram(degree):
            if p.essential:
                betas[degree] += thresholds >= p.birth
            else:
                betas[degree] += (thresholds >= p.birth) & (thresholds < p.death)
    return BettiCurves(thresholds, betas[0], betas[1])


def tropical_bruteforce(lengths, k: int) -> float:
    """Exhaustive max of sums over strictly increasing index tuples of size
    k. When fewer than k lengths exist, smaller tuples are considered too
    (the features module pads missing bars with zeros); the empty diagram
    gives 0."""
    if k not in (1, 2, 3, 4):
        raise OracleScopeError(f"k must be in 1..4, got {k}")
    lengths = list(lengths)
    if len(lengths) > 20:
        raise OracleScopeError(f"{len(lengths)} lengths exceed the enumeration guard (20)")
    sizes = [k] if len(lengths) >= k else range(1, len(lengths) + 1)
    best = 0.0
    for size in sizes:
        for combo in combinations(range(len(lengths)), size):
            acc = 0.0
            for idx in combo:
                acc += float(lengths[idx])
            if acc > best:
                best = acc
    return best
