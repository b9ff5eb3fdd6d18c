"""Generalized Pareto tail calibration of surprisal values.

Exceedances of the surprisal sample over its upper beta-quantile get a
two-parameter GPD fit by likelihood. The updated detector restricts the
shape to xi <= 0: densities built from a bounded kernel are bounded
below away from zero on the sample, so surprisals have a finite upper
endpoint and the tail cannot be heavy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

XI_NEAR_ZERO = 1e-8
MIN_EXCEEDANCES = 5
_SIGMA_BOX_LO = 1e-8
_SIGMA_BOX_HI = 1e8
CONSTRAINED_XI_BOUNDS = (-5.0, 0.0)
UNCONSTRAINED_XI_BOUNDS = (-5.0, 5.0)


@dataclass(frozen=True)
class GpdFit:
    """Fitted tail model: threshold u, scale sigma, shape xi, tail split beta.

    xi <= 0 whenever the fit used the bounded-tail constraint; the legacy
    detector may produce positive shapes.
    """

    u: float
    sigma: float
    xi: float
    beta: float
    n_exceed: int

    def __post_init__(self):
        if not (np.isfinite(self.sigma) and self.sigma > 0.0):
            raise ValueError(f"scale must be positive, got {self.sigma}")
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        if self.n_exceed < 1:
            raise ValueError("fit must use at least one exceedance")


def gpd_neg_loglik(sigma: float, xi: float, excesses) -> float:
    """Negative log-likelihood of positive excesses; +inf off the support.

    |xi| <= XI_NEAR_ZERO evaluates the exponential limit.
    """
    x = np.asarray(excesses, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError("no excesses to evaluate")
    if not (np.isfinite(sigma) and sigma > 0.0):
        return float("inf")
    if abs(xi) <= XI_NEAR_ZERO:
        return float(x.size * np.log(sigma) + x.sum() / sigma)
    t = 1.0 + xi * x / sigma
    if np.any(t <= 0.0):
        return float("inf")
    return float(x.size * np.log(sigma) + (1.0 + 1.0 / xi) * np.log(t).sum())


def fit_gpd_excesses(excesses, xi_bounds=CONSTRAINED_XI_BOUNDS):
    """Maximum-likelihood (sigma, xi, nll) for excesses over a threshold.

    Nelder-Mead from (mean excess, -0.1) with box clamping inside the
    objective; an exponential fit (xi = 0, sigma = mean excess) is always
    evaluated and wins if its likelihood is at least as good. Identical
    excesses short-circuit to the uniform-endpoint solution xi = -1,
    sigma = max excess.
    """
    x = np.asarray(excesses, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError("cannot fit a tail to zero excesses")
    if not np.all(np.isfinite(x)) or np.any(x <= 0.0):
        raise ValueError("excesses must be finite and positive")
    xmax = float(x.max())
    mean_excess = float(x.mean())
    if xmax == float(x.min()):
        # All mass at one point: the boundary case xi = -1 is a uniform
        # density 1/sigma on (0, sigma], maximized at sigma = xmax.
        return xmax, -1.0, float(x.size * np.log(xmax))

    sigma_lo, sigma_hi = _SIGMA_BOX_LO * xmax, _SIGMA_BOX_HI * xmax
    xi_lo, xi_hi = xi_bounds

    def clamp(theta):
        sigma = min(max(theta[0], sigma_lo), sigma_hi)
        xi = min(max(theta[1], xi_lo), xi_hi)
        return float(sigma), float(xi)

    # The preferred start can sit off-support when the largest excess
    # exceeds ten times the mean; fall back to the exponential side of
    # the shape axis, which is always feasible after clamping.
    start = np.array([mean_excess, -0.1])
    if not np.isfinite(gpd_neg_loglik(*clamp(start), x)):
        start = np.array([mean_excess, 0.1])
    result = minimize(lambda theta: gpd_neg_loglik(*clamp(theta), x),
                      x0=start, method="Nelder-Mead",
                      options={"xatol": 1e-10, "fatol": 1e-10,
                               "maxiter": 4000, "maxfev": 8000})
    sigma_opt, xi_opt = clamp(result.x)
    nll_opt = gpd_neg_loglik(sigma_opt, xi_opt, x)
    nll_exp = gpd_neg_loglik(mean_excess, 0.0, x)
    if nll_opt < nll_exp:
        return sigma_opt, xi_opt, nll_opt
    return mean_excess, 0.0, nll_exp


def _fit_tail(surprisal_values, beta: float, xi_bounds) -> GpdFit:
    s = np.asarray(surprisal_values, dtype=np.float64).ravel()
    if s.size == 0:
        raise ValueError("empty surprisal sample")
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    u = float(np.quantile(s, beta))
    excess = s[s > u] - u
    if excess.size < MIN_EXCEEDANCES:
        raise ValueError(
            f"tail too small: {excess.size} exceedances above the "
            f"beta={beta} threshold, need {MIN_EXCEEDANCES}; decrease beta")
    sigma, xi, _ = fit_gpd_excesses(excess, xi_bounds)
    return GpdFit(u=u, sigma=sigma, xi=xi, beta=beta, n_exceed=int(excess.size))


def fit_gpd_constrained(surprisal_values, beta: float) -> GpdFit:
    """Tail fit with the bounded-tail restriction xi <= 0."""
    return _fit_tail(surprisal_values, beta, CONSTRAINED_XI_BOUNDS)


def fit_gpd_unconstrained(surprisal_values, beta: float) -> GpdFit:
    """Tail fit with the shape free in [-5, 5] (legacy detector)."""
    return _fit_tail(surprisal_values, beta, UNCONSTRAINED_XI_BOUNDS)


def surprisal_probability(s_loo, fit: GpdFit):
    """Anomaly probability of leave-one-out surprisals under a tail fit.

    p = (1 - beta) * survival(s - u); values at or below the threshold
    return exactly 1 - beta, and values at or past a finite endpoint
    (xi < 0) return exactly 0. Scalar in, scalar out.
    """
    s = np.asarray(s_loo, dtype=np.float64)
    scalar = s.ndim == 0
    x = np.atleast_1d(s - fit.u).astype(np.float64)
    pos = np.maximum(x, 0.0)
    if abs(fit.xi) <= XI_NEAR_ZERO:
        surv = np.exp(-pos / fit.sigma)
    else:
        t = 1.0 + fit.xi * pos / fit.sigma
        surv = np.zeros_like(t)
        inside = t > 0.0
        surv[inside] = t[inside] ** (-1.0 / fit.xi)
    p = (1.0 - fit.beta) * np.where(x > 0.0, surv, 1.0)
    return float(p[0]) if scalar else p
