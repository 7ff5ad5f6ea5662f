"""Binary classification metrics over probability scores.

``roc_auc`` is the Mann-Whitney rank statistic: the fraction of
(positive, negative) document pairs where the positive scores higher, ties
counted as one half.  The implementation sorts once (O(n log n)) and equals
the quadratic pairwise definition exactly.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import kernels


def _as_score_arrays(
    scores: Sequence[float] | np.ndarray,
    labels: Sequence[int] | np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    s = np.ascontiguousarray(scores, dtype=np.float64)
    y = np.ascontiguousarray(labels, dtype=np.int8)
    if s.ndim != 1 or y.ndim != 1:
        raise ValueError("scores and labels must be one-dimensional")
    if s.shape[0] != y.shape[0]:
        raise ValueError(
            f"length mismatch: {s.shape[0]} scores vs {y.shape[0]} labels"
        )
    if s.shape[0] == 0:
        raise ValueError("scores and labels must be non-empty")
    if not np.all((s >= 0.0) & (s <= 1.0)):
        raise ValueError("scores must be probabilities in [0, 1]")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be 0 or 1")
    return s, y


def roc_auc(
    scores: Sequence[float] | np.ndarray,
    labels: Sequence[int] | np.ndarray,
) -> float:
    """Tie-aware ROC-AUC of positive-class probabilities against labels."""
    s, y = _as_score_arrays(scores, labels)
    n_pos = int(y.sum())
    if n_pos == 0 or n_pos == y.shape[0]:
        raise ValueError("AUC undefined for single-class labels")
    return float(kernels.auc_rank(s, y))


def accuracy(
    scores: Sequence[float] | np.ndarray,
    labels: Sequence[int] | np.ndarray,
    threshold: float = 0.5,
) -> float:
    """Fraction of documents where (score >= threshold) matches the label."""
    s, y = _as_score_arrays(scores, labels)
    predictions = (s >= threshold).astype(np.int8)
    return float(np.mean(predictions == y))


def f1(
    scores: Sequence[float] | np.ndarray,
    labels: Sequence[int] | np.ndarray,
    threshold: float = 0.5,
) -> float:
    """Positive-class F1 at the given threshold; 0.0 when undefined."""
    s, y = _as_score_arrays(scores, labels)
    predicted = s >= threshold
    tp = int(np.count_nonzero(predicted & (y == 1)))
    fp = int(np.count_nonzero(predicted & (y == 0)))
    fn = int(np.count_nonzero(~predicted & (y == 1)))
    denominator = 2 * tp + fp + fn
    if denominator == 0:
        return 0.0
    return 2 * tp / denominator
