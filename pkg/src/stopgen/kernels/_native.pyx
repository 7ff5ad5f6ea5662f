# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled AUC kernels.

Same contracts as kernels._fallback.  ``auc_batch_updated`` exploits the
structure of candidate deletions: the baseline order is sorted once, and each
candidate (which touches only the documents containing one token) is handled
by a linear merge walk instead of a fresh O(n log n) sort.  Rank sums are
exact multiples of 1/2, so both backends and both algorithms agree bit for
bit.
"""

from libcpp.algorithm cimport sort
from libcpp.pair cimport pair
from libcpp.vector cimport vector

import numpy as np

BACKEND_NAME = "native"

ctypedef signed char schar
ctypedef pair[double, schar] ScoreLabel


cdef double _auc_sorted_ranks(const double* scores,
                              const signed char* labels,
                              Py_ssize_t n,
                              vector[ScoreLabel]& work) nogil:
    """Rank-sum AUC over (scores, labels); ``work`` is reusable scratch."""
    cdef Py_ssize_t i, j, k
    cdef double rank_sum = 0.0
    cdef double avg_rank
    cdef long long n_pos = 0
    cdef long long n_neg

    work.clear()
    for i in range(n):
        work.push_back(ScoreLabel(scores[i], labels[i]))
    sort(work.begin(), work.end())

    i = 0
    while i < n:
        j = i + 1
        while j < n and work[j].first == work[i].first:
            j += 1
        # tied block occupies 1-based ranks i+1 .. j
        avg_rank = (i + j + 1) / 2.0
        for k in range(i, j):
            if work[k].second:
                rank_sum += avg_rank
                n_pos += 1
        i = j
    n_neg = n - n_pos
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def auc_rank(const double[::1] scores, const signed char[::1] labels):
    """Tie-aware ROC-AUC; both classes must be present (callers validate)."""
    cdef Py_ssize_t n = scores.shape[0]
    if n == 0:
        raise ValueError("empty score array")
    cdef vector[ScoreLabel] work
    work.reserve(n)
    cdef double result
    with nogil:
        result = _auc_sorted_ranks(&scores[0], &labels[0], n, work)
    return result


def auc_batch_updated(const double[::1] base_scores,
                      const signed char[::1] labels,
                      const long long[::1] doc_idx,
                      const double[::1] new_scores,
                      const long long[::1] offsets):
    """AUC of base_scores after each candidate's sparse score updates.

    Candidate c overwrites positions doc_idx[offsets[c]:offsets[c+1]] with
    the matching slice of new_scores; positions must be unique within a
    candidate.  One AUC per candidate is returned.
    """
    cdef Py_ssize_t n = base_scores.shape[0]
    cdef Py_ssize_t n_candidates = offsets.shape[0] - 1
    out_arr = np.empty(n_candidates, dtype=np.float64)
    if n_candidates == 0:
        return out_arr
    if n == 0:
        raise ValueError("empty score array")

    # baseline sorted once; candidates are handled by a merge walk
    order_arr = np.argsort(np.asarray(base_scores), kind="stable")
    cdef const long long[::1] order = order_arr.astype(np.int64, copy=False)

    cdef double[::1] out = out_arr
    cdef vector[double] sorted_vals = vector[double](n)
    cdef vector[schar] sorted_labs = vector[schar](n)
    cdef vector[Py_ssize_t] sorted_pos_of_doc = vector[Py_ssize_t](n)
    cdef vector[schar] removed = vector[schar](n, 0)
    cdef vector[ScoreLabel] fresh

    cdef Py_ssize_t i, j, c, doc
    cdef long long u, lo, hi, m
    cdef long long n_pos = 0, n_neg
    cdef double half_pos_ranks

    with nogil:
        for i in range(n):
            doc = <Py_ssize_t> order[i]
            sorted_vals[i] = base_scores[doc]
            sorted_labs[i] = labels[doc]
            sorted_pos_of_doc[doc] = i
            if labels[doc]:
                n_pos += 1
        n_neg = n - n_pos
        half_pos_ranks = n_pos * (n_pos + 1) / 2.0

        for c in range(n_candidates):
            lo = offsets[c]
            hi = offsets[c + 1]
            m = hi - lo

            fresh.clear()
            for u in range(lo, hi):
                doc = <Py_ssize_t> doc_idx[u]
                removed[sorted_pos_of_doc[doc]] = 1
                fresh.push_back(ScoreLabel(new_scores[u], labels[doc]))
            sort(fresh.begin(), fresh.end())

            out[c] = _merge_rank_auc(
                sorted_vals, sorted_labs, removed, fresh, n,
                n_pos, n_neg, half_pos_ranks,
            )

            for u in range(lo, hi):
                removed[sorted_pos_of_doc[<Py_ssize_t> doc_idx[u]]] = 0
    return out_arr


cdef double _merge_rank_auc(vector[double]& sorted_vals,
                            vector[schar]& sorted_labs,
                            vector[schar]& removed,
                            vector[ScoreLabel]& fresh,
                            Py_ssize_t n,
                            long long n_pos,
                            long long n_neg,
                            double half_pos_ranks) nogil:
    """Rank-sum AUC of (surviving baseline entries) merged with ``fresh``.

    Walks both ascending sequences once, grouping equal values across the
    two sources so tie credit matches a full re-sort exactly.
    """
    cdef Py_ssize_t i = 0, j = 0
    cdef Py_ssize_t m = fresh.size()
    cdef Py_ssize_t emitted = 0
    cdef double rank_sum = 0.0
    cdef double value, group_value = 0.0
    cdef signed char lab
    cdef Py_ssize_t group_start = 0
    cdef long long group_count = 0, group_pos = 0
    cdef bint take_base

    while True:
        while i < n and removed[i]:
            i += 1
        if i >= n and j >= m:
            break
        if i >= n:
            take_base = False
        elif j >= m:
            take_base = True
        else:
            take_base = sorted_vals[i] <= fresh[j].first
        if take_base:
            value = sorted_vals[i]
            lab = sorted_labs[i]
            i += 1
        else:
            value = fresh[j].first
            lab = fresh[j].second
            j += 1

        if group_count != 0 and value != group_value:
            if group_pos:
                # group spans 1-based ranks group_start+1 .. emitted
                rank_sum += group_pos * (group_start + emitted + 1) / 2.0
            group_start = emitted
            group_count = 0
            group_pos = 0
        group_value = value
        group_count += 1
        if lab:
            group_pos += 1
        emitted += 1

    if group_count != 0 and group_pos:
        rank_sum += group_pos * (group_start + emitted + 1) / 2.0
    return (rank_sum - half_pos_ranks) / (n_pos * n_neg)
