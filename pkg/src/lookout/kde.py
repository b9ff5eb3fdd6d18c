"""Multivariate kernel density estimation with a scalar bandwidth matrix.

With bandwidth matrix h * I_m the estimator at a sample point is

    f_j = h^(-m/2) / n * sum_i K((y_j - y_i) / sqrt(h)),

so kernels only ever see squared norms divided by h. Both kernel
profiles are normalized to integrate to one over R^m and peak at k0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .data import as_data_matrix

DENSITY_FLOOR = 1e-300
KERNEL_TAGS = ("gaussian", "epanechnikov")
_EVAL_BLOCK_ROWS = 2048


def unit_ball_volume(m: int) -> float:
    """Volume of the unit ball in R^m."""
    if m < 1:
        raise ValueError(f"dimension must be positive, got {m}")
    return math.pi ** (m / 2) / math.gamma(m / 2 + 1)


@dataclass(frozen=True)
class Kernel:
    """Spherically symmetric kernel profile on R^m with peak value k0."""

    tag: str
    m: int
    k0: float


def make_kernel(tag: str, m: int) -> Kernel:
    """Build a normalized kernel: gaussian or epanechnikov."""
    if m < 1:
        raise ValueError(f"dimension must be positive, got {m}")
    name = tag.lower()
    if name == "gaussian":
        k0 = (2.0 * math.pi) ** (-m / 2)
    elif name == "epanechnikov":
        k0 = (m + 2) / (2.0 * unit_ball_volume(m))
    else:
        raise ValueError(f"unknown kernel {tag!r}, expected one of {KERNEL_TAGS}")
    return Kernel(tag=name, m=m, k0=k0)


def _profile_from_sq(sq_norm, kernel: Kernel):
    """Kernel value from the squared norm of its argument."""
    if kernel.tag == "gaussian":
        return kernel.k0 * np.exp(-0.5 * sq_norm)
    return kernel.k0 * np.maximum(0.0, 1.0 - sq_norm)


def kernel_eval(u, kernel: Kernel) -> float:
    """Evaluate the kernel at a single vector argument."""
    v = np.asarray(u, dtype=np.float64).ravel()
    if v.size != kernel.m:
        raise ValueError(f"kernel is {kernel.m}-dimensional, argument has {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError("kernel argument contains non-finite entries")
    return float(_profile_from_sq(float(v @ v), kernel))


@dataclass(frozen=True)
class Bandwidth:
    """Scalar bandwidth h for the matrix h * I_m; h > 0."""

    h: float
    m: int

    def __post_init__(self):
        if not (np.isfinite(self.h) and self.h > 0.0):
            raise ValueError(f"bandwidth must be positive and finite, got {self.h}")
        if self.m < 1:
            raise ValueError(f"dimension must be positive, got {self.m}")

    @property
    def det_sqrt_inv(self) -> float:
        """|h I_m|^(-1/2) = h^(-m/2)."""
        return self.h ** (-self.m / 2)


def kde_at_points(points, bandwidth: Bandwidth, kernel: Kernel) -> np.ndarray:
    """Density estimate at every sample point, including its own term.

    Row blocks keep peak memory at block * n distances instead of n^2.
    """
    x = as_data_matrix(points)
    n, m = x.shape
    if bandwidth.m != m or kernel.m != m:
        raise ValueError(
            f"dimension mismatch: data m={m}, bandwidth m={bandwidth.m}, "
            f"kernel m={kernel.m}")
    scale = bandwidth.det_sqrt_inv / n
    out = np.empty(n)
    for lo in range(0, n, _EVAL_BLOCK_ROWS):
        hi = min(lo + _EVAL_BLOCK_ROWS, n)
        sq = cdist(x[lo:hi], x, metric="sqeuclidean") / bandwidth.h
        out[lo:hi] = scale * _profile_from_sq(sq, kernel).sum(axis=1)
    return out


def loo_kde(densities, n: int, bandwidth: Bandwidth, kernel: Kernel) -> np.ndarray:
    """Leave-one-out densities from full densities in closed form.

    Dropping point i removes exactly its self-term k0 * h^(-m/2) / n, so
    f_loo = (n * f - h^(-m/2) * k0) / (n - 1). Floored at DENSITY_FLOOR
    so logarithms stay finite.
    """
    if n < 2:
        raise ValueError(f"leave-one-out needs n >= 2, got {n}")
    f = np.asarray(densities, dtype=np.float64)
    raw = (n * f - bandwidth.det_sqrt_inv * kernel.k0) / (n - 1)
    return np.maximum(raw, DENSITY_FLOOR)


def surprisals(densities) -> np.ndarray:
    """Negative log densities, with the same floor as loo_kde before the log."""
    f = np.asarray(densities, dtype=np.float64)
    return -np.log(np.maximum(f, DENSITY_FLOOR))
