"""Seeded synthetic benchmarks, the v1/v2 comparison harness, and sweeps
probing how death-diameter quantiles scale with sample size.

Every generator draws from a dedicated PCG64 substream keyed by
(seed, experiment, iteration, rep), so cells are reproducible in
isolation and independent of execution order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .metrics import confusion, fmeasure, gmean, roc_auc
from .pipeline import LookoutParams, run_lookout
from .rips import death_diameters, quantile_diameter

EXPERIMENT_GRID: dict[int, range] = {
    1: range(1, 11),
    2: range(1, 8),
    3: range(1, 11),
    4: range(1, 11),
    5: range(1, 11),
    6: range(1, 11),
    7: range(1, 21),
}

ASYMPTOTIC_FAMILIES = ("gaussian", "fat_tail")
_FAMILY_CODES = {"gaussian": 0, "fat_tail": 1}
_COUNTEREXAMPLE_CODE = 2

_RADIAL_GRID_POINTS = 8192
_RADIAL_RMAX = 1e6


@dataclass(frozen=True)
class LabeledDataset:
    """Data matrix with ground-truth anomaly labels and generation metadata."""

    data: np.ndarray
    labels: np.ndarray
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class AnnulusConfig:
    """Geometry of the ring benchmark (experiment 6)."""

    inner_radius: float = 2.0
    outer_radius: float = 4.0
    anomaly_start_radius: float = 1.8


def _substream(*path: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(p) for p in path]))


def experiment_parameter(experiment: int, iteration: int) -> float:
    """The quantity an experiment sweeps, evaluated at one iteration."""
    _check_cell(experiment, iteration)
    if experiment == 1:
        return iteration / 10.0  # anomalous rate parameter r
    if experiment == 2:
        return 2.25 + 0.25 * iteration  # anomalous mean shift
    if experiment in (3, 4):
        return 1000.0 * iteration  # sample size
    if experiment == 5:
        return 2.0 + 0.5 * (iteration - 1)  # first-coordinate mean
    if experiment == 6:
        cfg = AnnulusConfig()
        return cfg.anomaly_start_radius * (10 - iteration) / 9.0  # anomaly radius
    return float(iteration)  # number of shifted coordinates


def _check_cell(experiment: int, iteration: int) -> None:
    if experiment not in EXPERIMENT_GRID:
        raise ValueError(f"unknown experiment id {experiment}, expected 1..7")
    grid = EXPERIMENT_GRID[experiment]
    if iteration not in grid:
        raise ValueError(
            f"iteration {iteration} outside experiment {experiment}'s grid "
            f"{grid.start}..{grid.stop - 1}")


def _gen_gamma_rate_shift(rng, iteration):
    r = iteration / 10.0
    normal = rng.gamma(shape=2.0, scale=0.5, size=(500, 2))
    anomalous = rng.gamma(shape=2.0, scale=1.0 / r, size=(10, 2))
    return normal, anomalous


def _gen_mean_shift(rng, iteration):
    mu = 2.25 + 0.25 * iteration
    normal = rng.standard_normal((1000, 2))
    anomalous = mu + rng.standard_normal((10, 2))
    return normal, anomalous


def _gen_ring_cluster(rng, iteration):
    n = 1000 * iteration
    n_anom = round(0.005 * n)
    normal = rng.standard_normal((n, 2))
    radius = 2.2 * np.sqrt(2.0)
    mu1 = rng.uniform(-radius, radius, size=n_anom)
    mu2 = np.sqrt(radius**2 - mu1**2)
    anomalous = np.column_stack([rng.normal(mu1, 0.1), rng.normal(mu2, 0.1)])
    return normal, anomalous


def _gen_gamma_tail_pick(rng, iteration):
    n = 1000 * iteration
    n_anom = round(0.005 * n)
    normal = rng.gamma(shape=2.0, scale=0.5, size=(n, 2))
    candidates = rng.gamma(shape=2.2, scale=0.5, size=(n, 2))
    norms = np.linalg.norm(candidates, axis=1)
    extreme = np.nonzero(norms > np.quantile(norms, 0.99))[0]
    chosen = rng.choice(extreme, size=n_anom, replace=False)
    return normal, candidates[chosen]


def _gen_first_axis_shift(rng, iteration):
    normal = rng.standard_normal((400, 6))
    anomalous = rng.standard_normal((5, 6))
    anomalous[:, 0] = rng.normal(2.0 + 0.5 * (iteration - 1), 0.2, size=5)
    return normal, anomalous


def _gen_annulus(rng, iteration):
    cfg = AnnulusConfig()
    theta = rng.uniform(0.0, 2.0 * np.pi, size=800)
    # square-root inversion keeps the planar density uniform over the ring
    radius = np.sqrt(rng.uniform(cfg.inner_radius**2, cfg.outer_radius**2, size=800))
    normal = np.column_stack([radius * np.cos(theta), radius * np.sin(theta),
                              rng.uniform(size=800)])
    rho = cfg.anomaly_start_radius * (10 - iteration) / 9.0
    phi = rng.uniform(0.0, 2.0 * np.pi, size=5)
    anomalous = np.column_stack([rho * np.cos(phi), rho * np.sin(phi),
                                 rng.uniform(size=5)])
    return normal, anomalous


def _gen_cube_corner(rng, iteration):
    points = rng.uniform(size=(500, 20))
    points[-1, :iteration] = 0.9
    return points[:-1], points[-1:]


_GENERATORS = {
    1: _gen_gamma_rate_shift,
    2: _gen_mean_shift,
    3: _gen_ring_cluster,
    4: _gen_gamma_tail_pick,
    5: _gen_first_axis_shift,
    6: _gen_annulus,
    7: _gen_cube_corner,
}


def generate_experiment(experiment: int, iteration: int, seed: int,
                        rep: int = 0) -> LabeledDataset:
    """One labeled dataset cell; anomalous rows come last and are labeled True."""
    _check_cell(experiment, iteration)
    rng = _substream(seed, experiment, iteration, rep)
    normal, anomalous = _GENERATORS[experiment](rng, iteration)
    data = np.vstack([normal, anomalous])
    labels = np.zeros(data.shape[0], dtype=bool)
    labels[normal.shape[0]:] = True
    meta = {"experiment": experiment, "iteration": iteration,
            "parameter": experiment_parameter(experiment, iteration),
            "seed": seed, "rep": rep}
    return LabeledDataset(data=data, labels=labels, meta=meta)


def _evaluate(result, labels) -> dict:
    counts = confusion(result.flags, labels)
    pos = counts.tp + counts.fn
    neg = counts.tn + counts.fp
    return {
        "tpr": counts.tp / pos if pos else 0.0,
        "fpr": counts.fp / neg if neg else 0.0,
        "fmeasure": fmeasure(counts),
        "gmean": gmean(counts),
        "auc": roc_auc(result.probabilities, labels),
    }

_METRIC_KEYS = ("tpr", "fpr", "fmeasure", "gmean", "auc")


def run_comparison(experiment: int, iterations=None, reps: int = 10,
                   seed: int = 0) -> tuple[list[dict], list[dict]]:
    """Run both detectors over a grid of cells with repeated draws.

    Returns (rows, summary): one row per (iteration, rep, variant) with
    tpr/fpr/fmeasure/gmean/auc, and one summary entry per (iteration,
    variant) holding the medians of those metrics across reps. The cube
    benchmark (experiment 7) runs without scaling; all others scale.
    """
    if experiment not in EXPERIMENT_GRID:
        raise ValueError(f"unknown experiment id {experiment}, expected 1..7")
    if reps < 1:
        raise ValueError(f"reps must be positive, got {reps}")
    if iterations is None:
        iterations = list(EXPERIMENT_GRID[experiment])
    for it in iterations:
        _check_cell(experiment, it)
    use_scale = experiment != 7

    rows: list[dict] = []
    for it in iterations:
        for rep in range(1, reps + 1):
            cell = generate_experiment(experiment, it, seed, rep)
            for variant in ("v1", "v2"):
                params = LookoutParams(scale=use_scale, variant=variant)
                result = run_lookout(cell.data, params)
                row = {"iteration": it,
                       "parameter": experiment_parameter(experiment, it),
                       "rep": rep, "variant": variant}
                row.update(_evaluate(result, cell.labels))
                rows.append(row)

    summary: list[dict] = []
    for it in iterations:
        for variant in ("v1", "v2"):
            block = [r for r in rows
                     if r["iteration"] == it and r["variant"] == variant]
            entry = {"iteration": it,
                     "parameter": experiment_parameter(experiment, it),
                     "variant": variant, "reps": len(block)}
            for key in _METRIC_KEYS:
                entry[key] = float(np.median([r[key] for r in block]))
            summary.append(entry)
    return rows, summary


@lru_cache(maxsize=None)
def _radial_table(m: int):
    """Tabulated radial CDF for the heavy-tail family on R^m.

    Returns (radii, cdf, total_mass) where total_mass is the full
    integral of r^(m-1) / (1 + r^(m+1)) over (0, inf); beyond the table
    the integrand is 1/r^2 to relative accuracy ~RMAX^-(m+1).
    """
    from scipy.integrate import cumulative_trapezoid

    radii = np.concatenate([[0.0], np.logspace(-6.0, np.log10(_RADIAL_RMAX),
                                               _RADIAL_GRID_POINTS)])
    weight = radii ** (m - 1) / (1.0 + radii ** (m + 1))
    mass = cumulative_trapezoid(weight, radii, initial=0.0)
    tail = 1.0 / _RADIAL_RMAX
    total = mass[-1] + tail
    return radii, mass / total, total


def fat_tail_norm_constant(m: int) -> float:
    """Constant c with density c / (1 + ||x||^(m+1)) integrating to one."""
    if m < 3:
        raise ValueError(f"heavy-tail family needs dimension >= 3, got {m}")
    import math

    sphere_area = 2.0 * math.pi ** (m / 2) / math.gamma(m / 2)
    return 1.0 / (sphere_area * _radial_table(m)[2])


def sample_fat_tail(n: int, m: int, seed) -> np.ndarray:
    """Draw n points with density proportional to 1 / (1 + ||x||^(m+1)).

    Direction is uniform on the sphere; radius comes from inverting the
    tabulated radial CDF, with the analytic 1/r tail taking over past
    the table's end. seed may be an int or a Generator.
    """
    if n < 1:
        raise ValueError(f"need a positive sample size, got {n}")
    if m < 3:
        raise ValueError(f"heavy-tail family needs dimension >= 3, got {m}")
    rng = np.random.default_rng(seed)
    radii, cdf, total = _radial_table(m)
    u = rng.uniform(size=n)
    radius = np.interp(u, cdf, radii)
    far = u > cdf[-1]
    if np.any(far):
        radius[far] = 1.0 / (total * (1.0 - u[far]))
    direction = rng.standard_normal((n, m))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    return radius[:, None] * direction


@dataclass(frozen=True)
class AsymptoticsRecord:
    """One death-diameter quantile observation in a sample-size sweep.

    scaled = d * n^(1/m) tracks the inter-point spacing rate;
    admissibility = n * d^(m/2) must diverge for the KDE lower bound at
    bandwidth d^2-like scales to stay informative. gamma == 1.0 marks
    the largest finite death instead of an interior quantile.
    """

    n: int
    m: int
    gamma: float
    d_value: float
    scaled: float
    admissibility: float


def _record(n: int, m: int, gamma: float, d: float) -> AsymptoticsRecord:
    return AsymptoticsRecord(n=n, m=m, gamma=gamma, d_value=d,
                             scaled=d * n ** (1.0 / m),
                             admissibility=n * d ** (m / 2.0))


def asymptotics_sweep(family: str, m: int, n_grid, gamma: float = 0.98,
                      reps: int = 10, seed: int = 0) -> list[AsymptoticsRecord]:
    """Death-diameter quantiles across sample sizes for one point family.

    For the gaussian family each draw also emits a gamma = 1.0 record
    carrying the largest finite death diameter, whose admissibility
    statistic is the one expected to decay.
    """
    if family not in ASYMPTOTIC_FAMILIES:
        raise ValueError(f"family must be one of {ASYMPTOTIC_FAMILIES}, got {family!r}")
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    if reps < 1:
        raise ValueError(f"reps must be positive, got {reps}")
    sizes = [int(v) for v in n_grid]
    if len(sizes) == 0 or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("n_grid must be a non-empty increasing sequence")
    if sizes[0] < 2:
        raise ValueError("n_grid entries must be at least 2")

    code = _FAMILY_CODES[family]
    records: list[AsymptoticsRecord] = []
    for n in sizes:
        for rep in range(1, reps + 1):
            rng = _substream(seed, code, n, rep)
            if family == "gaussian":
                points = rng.standard_normal((n, m))
            else:
                points = sample_fat_tail(n, m, rng)
            deaths = death_diameters(points)
            records.append(_record(n, m, gamma, quantile_diameter(deaths, gamma)))
            if family == "gaussian":
                records.append(_record(n, m, 1.0, float(deaths[-1])))
    return records


def counterexample_index(n: int, m: int) -> int:
    """Near-extreme order-statistic index round(n - n^(1 - 2/m) / 4)."""
    return int(round(n - 0.25 * n ** (1.0 - 2.0 / m)))


def counterexample_trial(n: int, m: int, reps: int = 20, seed: int = 0) -> float:
    """Fraction of heavy-tail draws whose near-extreme death diameter
    (the counterexample_index-th smallest) exceeds 1.

    A nonvanishing fraction demonstrates that high death-diameter order
    statistics need not shrink as n grows when the sampling density has
    a fat tail.
    """
    if m < 3:
        raise ValueError(f"heavy-tail family needs dimension >= 3, got {m}")
    if reps < 1:
        raise ValueError(f"reps must be positive, got {reps}")
    order_index = counterexample_index(n, m)
    if not 1 <= order_index <= n - 1:
        raise ValueError(f"n={n} too small: order-statistic index "
                         f"{order_index} falls outside 1..{n - 1}")
    hits = 0
    for rep in range(1, reps + 1):
        rng = _substream(seed, _COUNTEREXAMPLE_CODE, n, rep)
        deaths = death_diameters(sample_fat_tail(n, m, rng))
        if deaths[order_index - 1] > 1.0:
            hits += 1
    return hits / reps
