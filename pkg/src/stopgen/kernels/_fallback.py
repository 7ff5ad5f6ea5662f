"""Pure NumPy implementations of the AUC kernels.

Used whenever the compiled extension is unavailable (or forced via
STOPGEN_KERNEL=python).  Must stay numerically identical to the native
kernels: both compute the tie-averaged rank sum, whose terms are exact
multiples of 1/2 and therefore add without rounding for any realistic n.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def _tied_ranks(sorted_scores: np.ndarray) -> np.ndarray:
    """Average 1-based ranks for an ascending-sorted score array."""
    n = sorted_scores.shape[0]
    boundary = np.empty(n, dtype=bool)
    boundary[0] = True
    np.not_equal(sorted_scores[1:], sorted_scores[:-1], out=boundary[1:])
    starts = np.flatnonzero(boundary)
    ends = np.append(starts[1:], n)
    # group of sorted positions [start, end) gets rank (start+1 + end) / 2
    return np.repeat((starts + ends + 1) / 2.0, ends - starts)


def auc_rank(scores: np.ndarray, labels: np.ndarray) -> float:
    """Tie-aware ROC-AUC via the rank-sum statistic.

    ``scores`` float64, ``labels`` int8 with both classes present; callers
    validate.  Equals the pairwise win/tie count divided by n_pos * n_neg.
    """
    order = np.argsort(scores, kind="stable")
    ranks = _tied_ranks(scores[order])
    positive = labels[order] == 1
    n_pos = int(np.count_nonzero(positive))
    n_neg = scores.shape[0] - n_pos
    rank_sum = float(ranks[positive].sum())
    u = rank_sum - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def auc_batch_updated(
    base_scores: np.ndarray,
    labels: np.ndarray,
    doc_idx: np.ndarray,
    new_scores: np.ndarray,
    offsets: np.ndarray,
) -> np.ndarray:
    """AUC of ``base_scores`` after applying each candidate's score updates.

    Candidate c replaces base_scores[doc_idx[offsets[c]:offsets[c+1]]] with
    the matching slice of new_scores.  Returns one AUC per candidate.
    """
    n_candidates = offsets.shape[0] - 1
    out = np.empty(n_candidates, dtype=np.float64)
    for c in range(n_candidates):
        lo, hi = offsets[c], offsets[c + 1]
        work = base_scores.copy()
        work[doc_idx[lo:hi]] = new_scores[lo:hi]
        out[c] = auc_rank(work, labels)
    return out
