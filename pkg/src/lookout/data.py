"""Shared input validation for observation matrices."""

from __future__ import annotations

import numpy as np


def as_data_matrix(values) -> np.ndarray:
    """Coerce to a float64 matrix of shape (n, m) and validate it.

    One-dimensional input is treated as a single column. Requires at
    least two rows, at least one column, and all entries finite.
    """
    x = np.asarray(values, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    if x.ndim != 2:
        raise ValueError(f"expected a 2-d array of observations, got ndim={x.ndim}")
    n, m = x.shape
    if n < 2:
        raise ValueError(f"need at least two points, got {n}")
    if m < 1:
        raise ValueError("need at least one coordinate column")
    if not np.all(np.isfinite(x)):
        raise ValueError("data matrix contains non-finite entries")
    return x
