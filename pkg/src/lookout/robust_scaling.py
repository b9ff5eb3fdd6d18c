"""Robust standardization via pairwise covariance orthogonalization.

The covariance estimate starts from the Gnanadesikan-Kettenring identity
cov(a, b) = (s(a + b)^2 - s(a - b)^2) / 4 with s a robust scale, applied
to every column pair. Two orthogonalization passes (eigendecompose,
re-estimate all pairs in the rotated frame, rotate back) repair the
positive definiteness the raw pairwise matrix lacks. The whitening
factor U is the transposed Cholesky factor of the inverse, so rows map
as z = U (y - med).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import as_data_matrix

MAD_CONSISTENCY = 1.4826  # rescales MAD to estimate a normal sd
SCALE_FLOOR = 1e-12
ORTHOGONALIZATION_PASSES = 2
IDENTITY_CHECK_TOL = 1e-8
RIDGE_START_FRACTION = 1e-10
RIDGE_CAP_FRACTION = 1e-2


@dataclass(frozen=True)
class RobustCovEstimate:
    """Robust location/scatter summary of a data matrix.

    sigma_hat is symmetric positive definite (ridged if stabilization was
    needed), u_factor is upper triangular with U' U = inv(sigma_hat), and
    medians holds columnwise lower medians. ridge records the diagonal
    inflation actually applied, 0.0 for the clean path.
    """

    sigma_hat: np.ndarray
    u_factor: np.ndarray
    medians: np.ndarray
    ridge: float = 0.0


def lower_median(values) -> float:
    """Median taking the lower of the two middle order statistics."""
    x = np.asarray(values, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError("median of an empty vector")
    k = (x.size - 1) // 2
    return float(np.partition(x, k)[k])


def robust_scale(column) -> float:
    """Consistency-scaled median absolute deviation of a column.

    Floors at SCALE_FLOOR so zero-spread input cannot poison downstream
    matrix inversions with exact zeros.
    """
    x = np.asarray(column, dtype=np.float64).ravel()
    if x.size < 2:
        raise ValueError("robust scale needs at least two values")
    if not np.all(np.isfinite(x)):
        raise ValueError("robust scale: non-finite values")
    med = lower_median(x)
    scale = MAD_CONSISTENCY * lower_median(np.abs(x - med))
    return scale if scale > 0.0 else SCALE_FLOOR


def _gk_pairwise(x: np.ndarray) -> np.ndarray:
    """Pairwise robust covariance matrix; diagonal from squared scales."""
    m = x.shape[1]
    cov = np.empty((m, m))
    scales = [robust_scale(x[:, j]) for j in range(m)]
    for j in range(m):
        cov[j, j] = scales[j] ** 2
        for k in range(j + 1, m):
            s_plus = robust_scale(x[:, j] + x[:, k])
            s_minus = robust_scale(x[:, j] - x[:, k])
            cov[j, k] = cov[k, j] = 0.25 * (s_plus**2 - s_minus**2)
    return cov


def _whitening_factor(sigma: np.ndarray) -> np.ndarray:
    """Upper-triangular U with U' U = inv(sigma), verified against identity."""
    m = sigma.shape[0]
    inv_sigma = np.linalg.inv(sigma)
    inv_sigma = 0.5 * (inv_sigma + inv_sigma.T)
    u = np.linalg.cholesky(inv_sigma).T
    err = np.linalg.norm(u.T @ u @ sigma - np.eye(m)) / np.sqrt(m)
    if not np.isfinite(err) or err > IDENTITY_CHECK_TOL:
        raise np.linalg.LinAlgError("whitening factor failed the identity check")
    return u


def ogk_covariance(data) -> RobustCovEstimate:
    """Orthogonalized pairwise robust covariance with whitening factor.

    Near-singular estimates get a diagonal ridge, grown tenfold from
    RIDGE_START_FRACTION to RIDGE_CAP_FRACTION of the mean diagonal,
    until inversion and the identity check both succeed.
    """
    x = as_data_matrix(data)
    n, m = x.shape
    if n <= m:
        raise ValueError(f"covariance needs more rows than columns, got n={n}, m={m}")
    sigma = _gk_pairwise(x)
    for _ in range(ORTHOGONALIZATION_PASSES):
        sigma = 0.5 * (sigma + sigma.T)
        _, eigvecs = np.linalg.eigh(sigma)
        rotated = x @ eigvecs
        sigma = eigvecs @ _gk_pairwise(rotated) @ eigvecs.T
    sigma = 0.5 * (sigma + sigma.T)
    medians = np.array([lower_median(x[:, j]) for j in range(m)])

    try:
        return RobustCovEstimate(sigma_hat=sigma, u_factor=_whitening_factor(sigma),
                                 medians=medians)
    except np.linalg.LinAlgError:
        pass
    base = float(np.trace(sigma)) / m
    ridge = RIDGE_START_FRACTION * base
    cap = RIDGE_CAP_FRACTION * base
    while ridge <= cap * (1.0 + 1e-12):
        ridged = sigma + ridge * np.eye(m)
        try:
            return RobustCovEstimate(sigma_hat=ridged,
                                     u_factor=_whitening_factor(ridged),
                                     medians=medians, ridge=ridge)
        except np.linalg.LinAlgError:
            ridge *= 10.0
    raise np.linalg.LinAlgError(
        "robust covariance is numerically singular even at the ridge cap")


def standardize(data, estimate: RobustCovEstimate) -> np.ndarray:
    """Center on robust medians and whiten: z_i = U (y_i - med)."""
    x = as_data_matrix(data)
    m = estimate.medians.shape[0]
    if x.shape[1] != m:
        raise ValueError(
            f"estimate is for {m} columns, data has {x.shape[1]}")
    return (x - estimate.medians) @ estimate.u_factor.T
