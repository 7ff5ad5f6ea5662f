"""Independent reference implementations used to pin expected test values.

Nothing in here may share code with the paths under test: the AUC oracle is
the literal quadratic pair count, and the gradient oracle is central finite
differences over the scalar objective.
"""

from __future__ import annotations

import numpy as np


def pairwise_auc(scores, labels) -> float:
    """Quadratic definition: wins + half-credit ties over all pos/neg pairs."""
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    pos = s[y == 1]
    neg = s[y == 0]
    if pos.size == 0 or neg.size == 0:
        raise ValueError("needs both classes")
    wins = np.count_nonzero(pos[:, None] > neg[None, :])
    ties = np.count_nonzero(pos[:, None] == neg[None, :])
    return (wins + 0.5 * ties) / (pos.size * neg.size)


def central_difference_gradient(scalar_fun, theta, step=1e-6) -> np.ndarray:
    """Per-coordinate central differences of a scalar function."""
    theta = np.asarray(theta, dtype=np.float64)
    grad = np.empty_like(theta)
    for i in range(theta.size):
        bump = np.zeros_like(theta)
        bump[i] = step
        grad[i] = (scalar_fun(theta + bump) - scalar_fun(theta - bump)) / (
            2.0 * step
        )
    return grad


def full_rescore_auc(scorer, corpus, labels, token, batch_size=32) -> float:
    """Delta oracle path: delete the token, rescore every document."""
    from stopgen.corpus import delete_token
    from stopgen.metrics import roc_auc

    reduced = delete_token(corpus, token)
    texts = reduced.texts()
    scores = []
    for start in range(0, len(texts), batch_size):
        scores.extend(scorer.score_batch(texts[start : start + batch_size]))
    return roc_auc(scores, labels)
