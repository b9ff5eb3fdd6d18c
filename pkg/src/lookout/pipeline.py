"""End-to-end detectors: scale, bandwidth from death diameters, KDE,
leave-one-out surprisals, tail fit, probabilities, flags.

Both variants share the same skeleton and differ in three places. The
legacy detector (v1) min-max unitizes each column, takes the bandwidth
at the widest gap between consecutive death diameters, and leaves the
tail shape free in [-5, 5]. The updated detector (v2) standardizes with
the robust covariance factor, takes an upper quantile of the death
diameters, and restricts the tail shape to be non-positive.

The tail model is fitted on the surprisals of the full-sample densities
and then applied to the leave-one-out surprisals; the asymmetry is
deliberate, since the leave-one-out value of a genuinely isolated point
should land deep in the fitted tail rather than reshape it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import as_data_matrix
from .evt import GpdFit, fit_gpd_constrained, fit_gpd_unconstrained, surprisal_probability
from .kde import KERNEL_TAGS, Bandwidth, kde_at_points, loo_kde, make_kernel, surprisals
from .rips import death_diameters, max_gap_diameter, quantile_diameter
from .robust_scaling import ogk_covariance, standardize

MIN_OBSERVATIONS = 10
VARIANTS = ("v1", "v2")


@dataclass(frozen=True)
class LookoutParams:
    """Detector configuration.

    alpha: flagging level on calibrated probabilities.
    beta: tail split; the top 1 - beta of surprisals fit the GPD.
    gamma: death-diameter quantile used as bandwidth (v2 only).
    scale: apply the variant's scaling step before distances.
    kernel: "gaussian" or "epanechnikov".
    variant: which detector run_lookout dispatches to.
    """

    alpha: float = 0.001
    beta: float = 0.90
    gamma: float = 0.98
    scale: bool = True
    kernel: str = "gaussian"
    variant: str = "v2"

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            value = getattr(self, name)
            if not (np.isfinite(value) and 0.0 < value < 1.0):
                raise ValueError(f"{name} must lie in (0, 1), got {value}")
        if not self.alpha < 1.0 - self.beta:
            raise ValueError(
                f"alpha must stay below 1 - beta: points at or below the "
                f"threshold carry probability 1 - beta = {1.0 - self.beta:g}, "
                f"which alpha = {self.alpha:g} would flag wholesale")
        if self.kernel.lower() not in KERNEL_TAGS:
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")


@dataclass(frozen=True)
class AnomalyResult:
    """Per-point outputs plus the fitted tail and the bandwidth used."""

    probabilities: np.ndarray
    flags: np.ndarray
    surprisals_loo: np.ndarray
    bandwidth_used: float
    gpd: GpdFit


def minmax_unitize(data) -> np.ndarray:
    """Map each column affinely onto [0, 1]."""
    x = as_data_matrix(data)
    lo = x.min(axis=0)
    span = x.max(axis=0) - lo
    if np.any(span <= 0.0):
        bad = int(np.argmax(span <= 0.0))
        raise ValueError(f"column {bad} is constant; min-max scaling is degenerate")
    return (x - lo) / span


def _run(data, params: LookoutParams, variant: str) -> AnomalyResult:
    x = as_data_matrix(data)
    n, m = x.shape
    needed = max(MIN_OBSERVATIONS, m + 2)
    if n < needed:
        raise ValueError(f"need at least {needed} observations for m={m}, got {n}")

    if params.scale:
        if variant == "v2":
            z = standardize(x, ogk_covariance(x))
        else:
            z = minmax_unitize(x)
    else:
        z = x

    deaths = death_diameters(z)
    if variant == "v2":
        h = quantile_diameter(deaths, params.gamma)
    else:
        h = max_gap_diameter(deaths)
    bandwidth = Bandwidth(h=h, m=m)  # rejects h <= 0 (duplicate-dominated input)
    kernel = make_kernel(params.kernel, m)

    f_full = kde_at_points(z, bandwidth, kernel)
    f_loo = loo_kde(f_full, n, bandwidth, kernel)
    s_full = surprisals(f_full)
    s_loo = surprisals(f_loo)

    if variant == "v2":
        fit = fit_gpd_constrained(s_full, params.beta)
    else:
        fit = fit_gpd_unconstrained(s_full, params.beta)
    probabilities = surprisal_probability(s_loo, fit)
    flags = probabilities < params.alpha
    return AnomalyResult(probabilities=probabilities, flags=flags,
                         surprisals_loo=s_loo, bandwidth_used=h, gpd=fit)


def lookout_v2(data, params: LookoutParams | None = None) -> AnomalyResult:
    """Updated detector: robust standardization, quantile bandwidth, xi <= 0."""
    return _run(data, params if params is not None else LookoutParams(), "v2")


def lookout_v1(data, params: LookoutParams | None = None) -> AnomalyResult:
    """Legacy detector: unit-cube scaling, widest-gap bandwidth, free shape."""
    return _run(data, params if params is not None else LookoutParams(), "v1")


def run_lookout(data, params: LookoutParams) -> AnomalyResult:
    """Dispatch on params.variant."""
    return _run(data, params, params.variant)
