"""Death scales of connected components under Euclidean proximity merging.

A component of the distance-threshold graph dies exactly when a minimum
spanning tree edge of that length first appears, so the sorted MST edge
weights are the finite death diameters. The tree is built with dense
Prim: O(n^2) time, O(n) extra memory, no pairwise distance matrix.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .data import as_data_matrix


@njit(cache=True)
def _prim_death_weights(pts: np.ndarray) -> np.ndarray:
    n, m = pts.shape
    # Compacted working copy: active rows live in work[:size]. Swap-remove
    # keeps every scan contiguous and branch-free over stale entries.
    work = pts.copy()
    best = np.full(n, np.inf)
    out = np.empty(n - 1)
    cur = work[n - 1].copy()
    size = n - 1
    for step in range(n - 1):
        bi = 0
        bv = np.inf
        for i in range(size):
            d2 = 0.0
            for k in range(m):
                diff = work[i, k] - cur[k]
                d2 += diff * diff
            if d2 < best[i]:
                best[i] = d2
            if best[i] < bv:
                bv = best[i]
                bi = i
        out[step] = np.sqrt(bv)
        cur = work[bi].copy()
        size -= 1
        work[bi] = work[size]
        best[bi] = best[size]
    return np.sort(out)


def death_diameters(points) -> np.ndarray:
    """Sorted finite death diameters of a point cloud (MST edge lengths).

    Returns n - 1 values in ascending order. Bitwise deterministic for a
    given input: the scan order is fixed and squared distances accumulate
    coordinate by coordinate.
    """
    pts = np.ascontiguousarray(as_data_matrix(points))
    return _prim_death_weights(pts)


def quantile_diameter(deaths, gamma: float) -> float:
    """Linear-interpolation (Hyndman-Fan type 7) quantile of death values."""
    d = np.asarray(deaths, dtype=np.float64).ravel()
    if d.size == 0:
        raise ValueError("empty death vector")
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie strictly inside (0, 1), got {gamma}")
    return float(np.quantile(d, gamma))


def max_gap_diameter(deaths) -> float:
    """Death value at the left edge of the widest consecutive gap.

    Expects values sorted ascending, as returned by death_diameters.
    Ties pick the earliest gap.
    """
    d = np.asarray(deaths, dtype=np.float64).ravel()
    if d.size < 2:
        raise ValueError("need at least two death values to locate a gap")
    return float(d[int(np.argmax(np.diff(d)))])
