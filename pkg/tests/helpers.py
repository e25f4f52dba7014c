"""Shared test utilities."""

from __future__ import annotations

import numpy as np

from cubiph.cubical import CubicalComplex


def random_valid_order(cc: CubicalComplex, rng: np.random.Generator) -> np.ndarray:
    """A uniformly-random-ish total order satisfying both filtration
    invariants: value classes are processed in increasing order and cells
    within a class are drawn randomly among those whose faces are placed.
    Returns a 1-based rank grid.
    """
    values = cc.cell_values
    rows, cols = values.shape
    rank_grid = np.full((rows, cols), -1, dtype=np.int64)
    placed = np.zeros((rows, cols), dtype=bool)
    rank = 0
    for v in np.unique(values.ravel()):
        pending = {tuple(c) for c in np.argwhere(values == v)}
        while pending:
            ready = sorted(
                c for c in pending if all(placed[f] for f in cc.faces(*c))
            )
            pick = ready[int(rng.integers(0, len(ready)))]
            rank_grid[pick] = rank
            rank += 1
            placed[pick] = True
            pending.remove(pick)
    return rank_grid + 1


def random_grey_image(rng: np.random.Generator, max_side: int = 8, levels: int = 4) -> np.ndarray:
    h = int(rng.integers(1, max_side + 1))
    w = int(rng.integers(1, max_side + 1))
    return rng.integers(0, levels, size=(h, w)) / max(1, levels - 1)


def ring_image(size: int = 7, ring: float = 0.2, background: float = 0.9) -> np.ndarray:
    img = np.full((size, size), background)
    img[1 : size - 1, 1 : size - 1] = ring
    img[2 : size - 2, 2 : size - 2] = background
    return img
