"""Density-based anomaly detection with persistence-derived bandwidths.

The package exposes two detector variants that share a skeleton: robust
(or min-max) scaling, a kernel bandwidth read off the death diameters of
proximity merging, leave-one-out density surprisals, and a generalized
Pareto tail fit that converts surprisals into anomaly probabilities.
"""

from .data import as_data_matrix
from .evt import (
    GpdFit,
    fit_gpd_constrained,
    fit_gpd_excesses,
    fit_gpd_unconstrained,
    gpd_neg_loglik,
    surprisal_probability,
)
from .kde import (
    Bandwidth,
    Kernel,
    kde_at_points,
    kernel_eval,
    loo_kde,
    make_kernel,
    surprisals,
)
from .metrics import ConfusionCounts, confusion, fmeasure, gmean, roc_auc
from .pipeline import (
    AnomalyResult,
    LookoutParams,
    lookout_v1,
    lookout_v2,
    minmax_unitize,
    run_lookout,
)
from .rips import death_diameters, max_gap_diameter, quantile_diameter
from .robust_scaling import (
    RobustCovEstimate,
    lower_median,
    ogk_covariance,
    robust_scale,
    standardize,
)

__all__ = [
    "AnomalyResult",
    "Bandwidth",
    "ConfusionCounts",
    "GpdFit",
    "Kernel",
    "LookoutParams",
    "RobustCovEstimate",
    "as_data_matrix",
    "confusion",
    "death_diameters",
    "fit_gpd_constrained",
    "fit_gpd_excesses",
    "fit_gpd_unconstrained",
    "fmeasure",
    "gmean",
    "gpd_neg_loglik",
    "kde_at_points",
    "kernel_eval",
    "loo_kde",
    "lookout_v1",
    "lookout_v2",
    "lower_median",
    "make_kernel",
    "max_gap_diameter",
    "minmax_unitize",
    "ogk_covariance",
    "quantile_diameter",
    "robust_scale",
    "roc_auc",
    "run_lookout",
    "standardize",
    "surprisal_probability",
    "surprisals",
]

__version__ = "0.1.0"
