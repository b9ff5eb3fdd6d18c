"""Detection quality measures for flag vectors and anomaly scores."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion(flags, labels) -> ConfusionCounts:
    """Count flag/label agreement; True marks an anomaly on both sides."""
    f = np.asarray(flags, dtype=bool).ravel()
    y = np.asarray(labels, dtype=bool).ravel()
    if f.shape != y.shape:
        raise ValueError(f"length mismatch: {f.size} flags, {y.size} labels")
    return ConfusionCounts(tp=int(np.sum(f & y)), fp=int(np.sum(f & ~y)),
                           tn=int(np.sum(~f & ~y)), fn=int(np.sum(~f & y)))


def fmeasure(counts: ConfusionCounts) -> float:
    """Harmonic mean of precision and recall; 0.0 when undefined."""
    denom = 2 * counts.tp + counts.fp + counts.fn
    if denom == 0:
        return 0.0
    return 2 * counts.tp / denom


def gmean(counts: ConfusionCounts) -> float:
    """Geometric mean of recall and specificity; 0.0 when undefined."""
    pos = counts.tp + counts.fn
    neg = counts.tn + counts.fp
    if pos == 0 or neg == 0:
        return 0.0
    return float(np.sqrt((counts.tp / pos) * (counts.tn / neg)))


def roc_auc(scores, labels) -> float:
    """Area under the ROC curve where LOWER scores mean more anomalous.

    Computed from midranks (Mann-Whitney), so exactly tied scores
    contribute one half. Anomaly probabilities are scores here: a
    perfect detector gives anomalies the smallest probabilities.
    """
    s = np.asarray(scores, dtype=np.float64).ravel()
    y = np.asarray(labels, dtype=bool).ravel()
    if s.shape != y.shape:
        raise ValueError(f"length mismatch: {s.size} scores, {y.size} labels")
    if not np.all(np.isfinite(s)):
        raise ValueError("scores contain non-finite values")
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("roc_auc needs at least one anomaly and one normal point")
    ranks = rankdata(s)
    # Mann-Whitney: fraction of (pos, neg) pairs where the positive ranks
    # higher, ties half; with low-is-anomalous scores the AUC complements it.
    u_high = ranks[y].sum() - n_pos * (n_pos + 1) / 2.0
    return float(1.0 - u_high / (n_pos * n_neg))
