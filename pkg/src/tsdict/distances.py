"""Histogram comparison measures.

Each measure exists twice: a scalar version over sparse mappings (the
definition) and a matrix version over :class:`~tsdict.bagging.ProjectedBags`
used by nearest-neighbour search. Distances are minimised, similarities
maximised; :func:`closeness` hides the difference from callers.
"""

from __future__ import annotations

from collections.abc import Mapping
from enum import Enum
from math import sqrt

import numpy as np

from .bagging import ProjectedBags, SparseHistogram

__all__ = [
    "Measure",
    "euclidean_sq",
    "boss_distance",
    "histogram_intersection",
    "cosine_similarity",
    "pairwise",
    "closeness",
]


class Measure(str, Enum):
    EUCLID = "euclid"
    BOSS = "boss"
    HI = "hi"
    COSINE = "cosine"

    @property
    def is_similarity(self) -> bool:
        return self in (Measure.HI, Measure.COSINE)


def _values(h) -> dict:
    if isinstance(h, SparseHistogram):
        return h.weighted()
    if isinstance(h, Mapping):
        return dict(h)
    raise TypeError(f"expected a histogram mapping, got {type(h).__name__}")


def euclidean_sq(a, b) -> float:
    a, b = _values(a), _values(b)
    return sum((a.get(k, 0) - b.get(k, 0)) ** 2 for k in a.keys() | b.keys())


def boss_distance(test, train) -> float:
    """Squared differences summed over the words present in ``test`` only."""
    test, train = _values(test), _values(train)
    return sum((v - train.get(k, 0)) ** 2 for k, v in test.items() if v > 0)


def histogram_intersection(a, b) -> float:
    a, b = _values(a), _values(b)
    if any(v < 0 for v in a.values()) or any(v < 0 for v in b.values()):
        raise ValueError("histogram intersection needs non-negative entries")
    return sum(min(a[k], b[k]) for k in a.keys() & b.keys())


def cosine_similarity(a, b) -> float:
    a, b = _values(a), _values(b)
    na = sqrt(sum(v * v for v in a.values()))
    nb = sqrt(sum(v * v for v in b.values()))
    if na == 0 or nb == 0:
        raise ValueError("cosine similarity is undefined for a zero vector")
    dot = sum(v * b[k] for k, v in a.items() if k in b)
    return dot / (na * nb)


def _hi_matrix(q: ProjectedBags, r: ProjectedBags) -> np.ndarray:
    out = np.zeros((q.n_rows, r.n_rows))
    if r.matrix.shape[1] == 0:
        return out
    ref = r.matrix.toarray()
    qm = q.matrix
    for i in range(q.n_rows):
        lo, hi = qm.indptr[i], qm.indptr[i + 1]
        if lo == hi:
            continue
        cols = qm.indices[lo:hi]
        out[i] = np.minimum(ref[:, cols], qm.data[lo:hi]).sum(axis=1)
    return out


def pairwise(q: ProjectedBags, r: ProjectedBags, measure: Measure) -> np.ndarray:
    """``(n_q, n_r)`` matrix of ``measure(q_i, r_j)``.

    ``q`` and ``r`` must be projected onto the same vocabulary; keys of ``q``
    missing from it still count through ``q.sq`` (they cannot match anything
    in ``r``). For count data every entry is exact in float64.
    """
    measure = Measure(measure)
    if q.matrix.shape[1] != r.matrix.shape[1]:
        raise ValueError("query and reference bags use different vocabularies")
    if measure is Measure.HI:
        return _hi_matrix(q, r)
    cross = (q.matrix @ r.matrix.T).toarray()
    if measure is Measure.EUCLID:
        return q.sq[:, None] + r.sq[None, :] - 2.0 * cross
    if measure is Measure.BOSS:
        support = q.matrix.copy()
        support.data = (support.data > 0).astype(np.float64)
        r_sq = r.matrix.multiply(r.matrix)
        return q.sq[:, None] - 2.0 * cross + (support @ r_sq.T).toarray()
    norms = np.sqrt(q.sq)[:, None] * np.sqrt(r.sq)[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(norms > 0, cross / np.where(norms > 0, norms, 1.0), 0.0)


def closeness(values: np.ndarray, measure: Measure) -> np.ndarray:
    """Map measure values so that smaller always means closer."""
    return -values if Measure(measure).is_similarity else values
