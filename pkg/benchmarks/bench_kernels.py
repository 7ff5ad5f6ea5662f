#!/usr/bin/env python3
"""Benchmark the compiled AUC kernels against the pure-Python fallback.

Times the two hot operations of the ranking engine:

* auc_rank        - one tie-aware AUC over n documents
* auc_batch_updated - AUC of n documents recomputed for k candidate
                      deletions, each touching a handful of scores

Run after `pip install -e . --no-build-isolation`:

    python benchmarks/bench_kernels.py
"""

import random
import time

import numpy as np

from stopgen.kernels import _fallback

try:
    from stopgen.kernels import _native
except ImportError:
    _native = None


def _instance(rng, n):
    scores = np.array([rng.choice([i / 16 for i in range(17)]) for _ in range(n)])
    labels = np.array([rng.randint(0, 1) for _ in range(n)], dtype=np.int8)
    labels[0], labels[-1] = 1, 0
    return scores, labels


def _batch_updates(rng, n, k, touches):
    doc_idx, new_scores, offsets = [], [], [0]
    for _ in range(k):
        m = rng.randint(1, touches)
        doc_idx.extend(rng.sample(range(n), m))
        new_scores.extend(rng.random() for _ in range(m))
        offsets.append(len(doc_idx))
    return (
        np.array(doc_idx, dtype=np.int64),
        np.array(new_scores, dtype=np.float64),
        np.array(offsets, dtype=np.int64),
    )


def _time(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    rng = random.Random(99)
    backends = [("python", _fallback)]
    if _native is not None:
        backends.append(("native", _native))
    else:
        print("native kernel not built; showing fallback only\n")

    print(f"{'operation':<34} " + " ".join(f"{name:>12}" for name, _ in backends)
          + ("      speedup" if len(backends) == 2 else ""))

    for n in (500, 2000, 8000):
        scores, labels = _instance(rng, n)
        times = []
        for _, mod in backends:
            times.append(_time(lambda m=mod: [m.auc_rank(scores, labels)
                                              for _ in range(50)]) / 50)
        row = f"auc_rank n={n:<6}                   "
        row += " ".join(f"{t * 1e6:>10.1f}us" for t in times)
        if len(times) == 2:
            row += f" {times[0] / times[1]:>11.1f}x"
        print(row)

    for n, k in ((1821, 2000), (2000, 5000)):
        scores, labels = _instance(rng, n)
        doc_idx, new_scores, offsets = _batch_updates(rng, n, k, 24)
        times = []
        for _, mod in backends:
            times.append(_time(lambda m=mod: m.auc_batch_updated(
                scores, labels, doc_idx, new_scores, offsets), repeats=3))
        row = f"auc_batch_updated n={n} k={k:<6}"
        row += " ".join(f"{t * 1e3:>10.1f}ms" for t in times)
        if len(times) == 2:
            row += f" {times[0] / times[1]:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
