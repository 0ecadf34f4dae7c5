"""Spatial-pyramid bags over BOSS words and the SP ensemble.

A pyramid with ``L`` levels splits the series into ``2**(l-1)`` contiguous
segments at level ``l`` and keeps one word histogram per segment, weighted by
``1 / 2**(L - l)``. A window belongs to the segment holding its first point,
so each level's segment counts add up to the plain bag.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bagging import BagConfig, KeyedRows, SparseHistogram, numerosity_mask
from .classifiers import (
    DictionaryConfig,
    EnsembleMember,
    ParameterGrid,
    RETAIN_FRACTION,
    WordTransform,
    _window_cells,
    ensemble_predict,
    retain_ensemble,
    rows_loocv,
)
from .distances import Measure, boss_distance, histogram_intersection
from .symbolic import BreakpointTable

__all__ = [
    "PyramidHistogram",
    "segment_bounds",
    "build_pyramid",
    "pyramid_distance",
    "PyramidTransform",
    "build_sp_ensemble",
    "SpatialPyramidBOSS",
    "format_pyramids",
    "parse_pyramids",
    "MAX_LEVELS",
    "MAX_ENSEMBLE",
]

MAX_LEVELS = 3
MAX_ENSEMBLE = 100


def segment_bounds(m: int, n_segments: int) -> np.ndarray:
    """Start offsets of ``n_segments`` near-equal parts of ``range(m)`` plus ``m``.

    Leading segments absorb the remainder.
    """
    base, extra = divmod(m, n_segments)
    sizes = np.full(n_segments, base)
    sizes[:extra] += 1
    return np.concatenate([[0], np.cumsum(sizes)])


def _check_levels(m: int, w: int, L: int) -> None:
    if L < 1:
        raise ValueError(f"number of levels must be >= 1 (got {L})")
    shortest = m // 2 ** (L - 1)
    if shortest < w:
        raise ValueError(f"pyramid level {L} segments ({shortest} points) are shorter than the window {w}")


def _segment_offset(level: int) -> int:
    return 2 ** (level - 1) - 1


def pyramid_rows(keys: np.ndarray, m: int, w: int, L: int, alpha_l: int, numerosity: bool) -> KeyedRows:
    """Pyramid features from window word keys ``(n, m - w + 1)``.

    Composite key = ``word * (2**L - 1) + global_segment``.
    """
    _check_levels(m, w, L)
    n_seg_total = 2**L - 1
    if alpha_l * n_seg_total > 2**64:
        raise ValueError("pyramid keys exceed the 64-bit key space")
    n, n_win = keys.shape
    keep = numerosity_mask(keys) if numerosity else np.ones(keys.shape, dtype=bool)
    rows_1 = np.repeat(np.arange(n), n_win)[keep.ravel()]
    words = keys.ravel()[keep.ravel()]
    starts = np.tile(np.arange(n_win), n)[keep.ravel()]
    rows, comp, weights = [], [], []
    for level in range(1, L + 1):
        bounds = segment_bounds(m, 2 ** (level - 1))
        seg = np.searchsorted(bounds[1:], starts, side="right")
        gseg = (seg + _segment_offset(level)).astype(np.uint64)
        rows.append(rows_1)
        comp.append(words * np.uint64(n_seg_total) + gseg)
        weights.append(np.full(rows_1.size, 1.0 / 2 ** (L - level)))
    return KeyedRows.from_occurrences(n, np.concatenate(rows), np.concatenate(comp), np.concatenate(weights))


@dataclass
class PyramidHistogram:
    """Per-segment histograms, ``segments[i] = (level, index, histogram)``."""

    L: int
    segments: list

    def to_vector(self, normalize: bool = False) -> dict:
        """Weighted concatenation keyed by ``(level, segment, word)``."""
        vec = {}
        for level, idx, hist in self.segments:
            for k, v in hist.weighted().items():
                vec[(level, idx, k)] = v
        if normalize:
            total = sum(vec.values())
            if total > 0:
                vec = {k: v / total for k, v in vec.items()}
        return vec

    def level_sum(self, level: int) -> dict:
        out: dict = {}
        for lev, _, hist in self.segments:
            if lev == level:
                for k, v in hist.items():
                    out[k] = out.get(k, 0) + v
        return out


def build_pyramid(series, cfg: BagConfig, disc_model: BreakpointTable | None, L: int) -> PyramidHistogram:
    """Pyramid of one series under the bag parameters ``cfg``."""
    x = np.asarray(series, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("series must be one-dimensional")
    _check_levels(x.size, cfg.w, L)
    if disc_model is None:
        if cfg.disc.value == "mcb":
            raise ValueError("MCB discretisation needs a fitted breakpoint table")
        disc_model = BreakpointTable.gaussian(cfg.l, cfg.alpha)
    keys = WordTransform(cfg, disc_model).word_keys(x[None, :])[0]
    keep = numerosity_mask(keys) if cfg.numerosity else np.ones(keys.size, dtype=bool)
    starts = np.flatnonzero(keep)
    words = keys[keep]
    segments = []
    for level in range(1, L + 1):
        bounds = segment_bounds(x.size, 2 ** (level - 1))
        seg = np.searchsorted(bounds[1:], starts, side="right")
        for s in range(2 ** (level - 1)):
            uniq, counts = np.unique(words[seg == s], return_counts=True)
            hist = SparseHistogram(dict(zip(uniq.tolist(), counts.tolist())), weight=1.0 / 2 ** (L - level))
            segments.append((level, s, hist))
    return PyramidHistogram(L, segments)


def pyramid_distance(test: PyramidHistogram, train: PyramidHistogram, measure) -> float:
    """BOSS distance or histogram intersection over the weighted concatenation."""
    if test.L != train.L:
        raise ValueError(f"pyramids have different depths ({test.L} != {train.L})")
    measure = Measure(measure)
    a, b = test.to_vector(), train.to_vector()
    if measure is Measure.BOSS:
        return boss_distance(a, b)
    if measure is Measure.HI:
        return histogram_intersection(a, b)
    raise ValueError(f"pyramids support the boss and hi measures, not {measure.value}")


class PyramidTransform:
    """Series -> pyramid feature rows for one member; HI members are l1-normalised."""

    def __init__(self, word: WordTransform, L: int, m: int, normalize: bool):
        self.word = word
        self.L = L
        self.m = m
        self.normalize = normalize

    @property
    def cfg(self) -> BagConfig:
        return self.word.cfg

    @property
    def own_table(self) -> BreakpointTable:
        return self.word.own_table

    @property
    def params(self) -> dict:
        return {**self.word.params, "L": self.L}

    def rows_from_keys(self, keys: np.ndarray) -> KeyedRows:
        cfg = self.word.cfg
        rows = pyramid_rows(keys, self.m, cfg.w, self.L, cfg.alpha**cfg.l, cfg.numerosity)
        return rows.l1_normalized() if self.normalize else rows

    def transform(self, X: np.ndarray, cache: dict | None = None) -> KeyedRows:
        X = np.atleast_2d(X)
        if X.shape[1] != self.m:
            raise ValueError(f"expected series of length {self.m}, got {X.shape[1]}")
        return self.rows_from_keys(self.word.word_keys(X, cache))


def _valid_levels(m: int, w: int) -> list[int]:
    return [L for L in range(2, MAX_LEVELS + 1) if m // 2 ** (L - 1) >= w]


def _sp_window(X, y, w, cfg: DictionaryConfig, normalize: bool):
    m = X.shape[1]
    cells = sorted(_window_cells(X, w, cfg), key=lambda c: (c[0].l, c[0].p, c[0].alpha))
    best = None  # (acc, transform, keys)
    for bc, table, keys in cells:
        tr = PyramidTransform(WordTransform(bc, table), 1, m, normalize)
        acc = rows_loocv(tr.rows_from_keys(keys), y, cfg.measure)
        if best is None or acc > best[0]:
            best = (acc, tr, keys)
    if best is None:
        return None
    acc0, tr0, keys = best
    for L in _valid_levels(m, w):
        tr = PyramidTransform(tr0.word, L, m, normalize)
        acc = rows_loocv(tr.rows_from_keys(keys), y, cfg.measure)
        if acc > best[0]:
            best = (acc, tr, keys)
    return best


def build_sp_ensemble(train, grid: ParameterGrid | None = None, measure="hi", max_ensemble: int = MAX_ENSEMBLE):
    """Spatial-pyramid BOSS ensemble.

    Per window: best word length at one level, then two and three levels on
    that feature set (an upgrade needs strictly higher accuracy); windows
    within 92% of the best are kept, at most ``max_ensemble`` of them.
    """
    measure = Measure(measure)
    if measure not in (Measure.BOSS, Measure.HI):
        raise ValueError("spatial pyramids use the boss or hi measure")
    cfg = DictionaryConfig(measure=measure, ensemble=True, grid=grid if grid is not None else ParameterGrid())
    X = np.asarray(train.X, dtype=np.float64)
    y = np.asarray(train.y, dtype=np.int64)
    windows = cfg.grid.window_lengths(X.shape[1])
    if not windows:
        raise ValueError(f"no grid window fits series of length {X.shape[1]}")
    normalize = measure is Measure.HI
    per_window = []
    for w in windows:
        res = _sp_window(X, y, w, cfg, normalize)
        if res is not None:
            acc, tr, keys = res
            per_window.append((acc, w, tr, keys))
    per_window.sort(key=lambda r: (-r[0], r[1]))
    members = [EnsembleMember(tr, tr.rows_from_keys(keys), y, measure, acc) for acc, _, tr, keys in per_window]
    kept = retain_ensemble(members, ensemble=True, fraction=RETAIN_FRACTION)
    return kept[:max_ensemble]


class SpatialPyramidBOSS:
    """SP ensemble estimator (``measure='hi'`` for SP-HI, ``'boss'`` for SP-BD)."""

    def __init__(self, measure="hi", grid: ParameterGrid | None = None, max_ensemble: int = MAX_ENSEMBLE):
        self.measure = measure
        self.grid = grid
        self.max_ensemble = max_ensemble

    def fit(self, X, y=None):
        from .classifiers import _as_dataset

        data = _as_dataset(X, y)
        self.n_classes_ = int(np.max(data.y)) + 1
        self.members_ = build_sp_ensemble(data, self.grid, self.measure, self.max_ensemble)
        return self

    def predict(self, X) -> np.ndarray:
        return ensemble_predict(X, self.members_, self.n_classes_)

    def score(self, X, y) -> float:
        return float(np.mean(self.predict(X) == np.asarray(y)))


def format_pyramids(pyramids) -> str:
    """``label k level.segment:key:count ...`` per line."""
    lines = []
    for pyr, label in pyramids:
        items = []
        for level, idx, hist in pyr.segments:
            items += [f"{level}.{idx}:{k}:{v}" for k, v in sorted(hist.items())]
        lines.append(" ".join([str(label), str(len(items))] + items))
    return "\n".join(lines) + ("\n" if lines else "")


def parse_pyramids(text: str, L: int):
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        fields = line.split()
        label, k = int(fields[0]), int(fields[1])
        if len(fields) - 2 != k:
            raise ValueError(f"line {lineno}: expected {k} entries, found {len(fields) - 2}")
        counts: dict = {}
        for item in fields[2:]:
            seg, key, val = item.split(":")
            level, idx = (int(v) for v in seg.split("."))
            counts.setdefault((level, idx), {})[int(key)] = int(val)
        segments = [
            (lev, s, SparseHistogram(counts.get((lev, s), {}), weight=1.0 / 2 ** (L - lev)))
            for lev in range(1, L + 1)
            for s in range(2 ** (lev - 1))
        ]
        out.append((PyramidHistogram(L, segments), label))
    return out
