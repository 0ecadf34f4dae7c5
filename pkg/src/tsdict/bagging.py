"""Sliding-window bagging: series -> words -> sparse word histograms.

The per-series loop of both BOP and BOSS: every window of length ``w`` is
approximated, discretised into a word and counted, except that a word equal
to the previous window's word is skipped when numerosity reduction is on.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import sparse

from .symbolic import (
    BreakpointTable,
    dft_batch,
    disjoint_windows,
    fit_breakpoints,
    paa_batch,
    sliding_windows,
    word_keys,
    znormalize,
)

__all__ = [
    "Approx",
    "Disc",
    "BagConfig",
    "SparseHistogram",
    "bag_series",
    "bag_dataset",
    "fit_discretiser",
    "series_word_keys",
    "format_bags",
    "parse_bags",
]


class Approx(str, Enum):
    PAA = "paa"
    DFT = "dft"


class Disc(str, Enum):
    GAUSSIAN = "gaussian"
    MCB = "mcb"


@dataclass(frozen=True)
class BagConfig:
    """Parameters of one bag-of-words transform.

    ``p`` only matters for the DFT approximation (drop the zero-frequency
    coefficient). ``numerosity`` switches numerosity reduction.
    """

    w: int
    l: int
    alpha: int = 4
    p: bool = True
    approx: Approx = Approx.DFT
    disc: Disc = Disc.MCB
    numerosity: bool = True

    def __post_init__(self):
        object.__setattr__(self, "approx", Approx(self.approx))
        object.__setattr__(self, "disc", Disc(self.disc))
        if self.w < 2:
            raise ValueError(f"window length must be >= 2 (got {self.w})")
        if self.alpha < 2:
            raise ValueError(f"alphabet size must be >= 2 (got {self.alpha})")
        if self.approx is Approx.DFT:
            if self.l < 2 or self.l % 2:
                raise ValueError(f"DFT word length must be even (got {self.l})")
            if self.l // 2 + (1 if self.p else 0) > self.w:
                raise ValueError(f"word length {self.l} too long for window {self.w}")
        elif not 1 <= self.l <= self.w:
            raise ValueError(f"word length must satisfy 1 <= l <= w (got {self.l}, {self.w})")
        if self.alpha**self.l > 2**64:
            raise ValueError("alpha**l exceeds the 64-bit key space")


def approximate(windows: np.ndarray, cfg: BagConfig) -> np.ndarray:
    """Compress ``(..., w)`` windows to ``(..., l)`` real values.

    Fixed Gaussian breakpoints assume standard-normal inputs, so under that
    discretiser windows are z-normalised first (the SAX convention) and DFT
    coefficients are rescaled by ``sqrt(2 / w)``, the standard deviation of
    a coefficient of unit white noise. MCB is rank based and sees raw values.
    """
    if cfg.disc is Disc.GAUSSIAN:
        windows = znormalize(windows)
    if cfg.approx is Approx.PAA:
        return paa_batch(windows, cfg.l)
    coeffs = dft_batch(windows, cfg.l, cfg.p)
    if cfg.disc is Disc.GAUSSIAN:
        coeffs = coeffs * np.sqrt(2.0 / cfg.w)
    return coeffs


def fit_discretiser(X: np.ndarray, cfg: BagConfig) -> BreakpointTable:
    """Breakpoint table for ``cfg``: fixed Gaussian or MCB fitted on ``X``."""
    if cfg.disc is Disc.GAUSSIAN:
        return BreakpointTable.gaussian(cfg.l, cfg.alpha)
    X = np.asarray(X, dtype=np.float64)
    if X.size == 0:
        raise ValueError("cannot fit MCB on an empty training set")
    if X.shape[1] < cfg.w:
        raise ValueError(f"window exceeds series length ({cfg.w} > {X.shape[1]})")
    return fit_breakpoints(approximate(disjoint_windows(X, cfg.w), cfg), cfg.alpha)


def series_word_keys(X: np.ndarray, cfg: BagConfig, table: BreakpointTable) -> np.ndarray:
    """Word key of every window of every row of ``X``, shape ``(n, m - w + 1)``."""
    coeffs = approximate(sliding_windows(X, cfg.w), cfg)
    return word_keys(table.discretise(coeffs), cfg.alpha)


def numerosity_mask(keys: np.ndarray) -> np.ndarray:
    """True where a window's word differs from the previous window's word."""
    keep = np.ones(keys.shape, dtype=bool)
    keep[..., 1:] = keys[..., 1:] != keys[..., :-1]
    return keep


class SparseHistogram(Mapping):
    """Word-key -> count map with an optional uniform weight.

    Mapping access returns raw counts; :meth:`weighted` gives the values a
    distance measure sees (``count * weight``). Zero counts are never stored.
    """

    __slots__ = ("_counts", "weight")

    def __init__(self, counts=None, weight: float = 1.0):
        self._counts = {int(k): v for k, v in dict(counts or {}).items() if v != 0}
        for v in self._counts.values():
            if v < 0:
                raise ValueError("histogram counts must be non-negative")
        self.weight = float(weight)

    def __getitem__(self, key):
        return self._counts[int(key)]

    def get(self, key, default=0):
        return self._counts.get(int(key), default)

    def __iter__(self):
        return iter(self._counts)

    def __len__(self):
        return len(self._counts)

    def __repr__(self):
        return f"SparseHistogram({dict(sorted(self._counts.items()))!r}, weight={self.weight})"

    def __eq__(self, other):
        if isinstance(other, SparseHistogram):
            return self._counts == other._counts and self.weight == other.weight
        if isinstance(other, Mapping):
            return self.weight == 1.0 and self._counts == dict(other)
        return NotImplemented

    def total(self):
        return sum(self._counts.values())

    def weighted(self) -> dict:
        if self.weight == 1.0:
            return dict(self._counts)
        return {k: v * self.weight for k, v in self._counts.items()}


def _keys_to_histogram(keys: np.ndarray, numerosity: bool) -> SparseHistogram:
    if numerosity:
        keys = keys[numerosity_mask(keys)]
    uniq, counts = np.unique(keys, return_counts=True)
    return SparseHistogram(dict(zip(uniq.tolist(), counts.tolist())))


def bag_series(series, cfg: BagConfig, disc_model: BreakpointTable | None = None) -> SparseHistogram:
    """Bag one series.

    ``disc_model`` must be given for MCB (fit it with :func:`fit_discretiser`
    on the training set) and is ignored for Gaussian breakpoints.
    """
    x = np.asarray(series, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("series must be one-dimensional")
    if x.size < cfg.w:
        raise ValueError(f"window exceeds series length ({cfg.w} > {x.size})")
    if cfg.disc is Disc.MCB:
        if disc_model is None:
            raise ValueError("MCB discretisation needs a fitted breakpoint table")
        table = disc_model
    else:
        table = BreakpointTable.gaussian(cfg.l, cfg.alpha)
    if table.word_length != cfg.l:
        raise ValueError("breakpoint table does not match the word length")
    keys = series_word_keys(x[None, :], cfg, table)[0]
    return _keys_to_histogram(keys, cfg.numerosity)


def bag_dataset(data, cfg: BagConfig):
    """Bag every series of ``data``.

    Returns ``(bags, model)`` where ``bags`` is a list of
    ``(SparseHistogram, label)`` in input order and ``model`` is the fitted
    MCB table (``None`` for Gaussian breakpoints or an empty dataset).
    """
    X = np.asarray(data.X, dtype=np.float64)
    y = np.asarray(data.y)
    if X.shape[0] == 0:
        return [], None
    if X.shape[1] < cfg.w:
        raise ValueError(f"window exceeds series length ({cfg.w} > {X.shape[1]})")
    model = fit_discretiser(X, cfg) if cfg.disc is Disc.MCB else None
    table = model if model is not None else BreakpointTable.gaussian(cfg.l, cfg.alpha)
    keys = series_word_keys(X, cfg, table)
    bags = [(_keys_to_histogram(k, cfg.numerosity), int(lab)) for k, lab in zip(keys, y)]
    return bags, model


# -- sparse aggregation shared by the fast classifier paths -----------------


@dataclass
class KeyedRows:
    """Aggregated ``(row, key) -> value`` triplets, sorted by row then key."""

    n_rows: int
    rows: np.ndarray
    keys: np.ndarray
    values: np.ndarray

    @classmethod
    def from_occurrences(cls, n_rows, rows, keys, weights=None) -> KeyedRows:
        rows = np.asarray(rows, dtype=np.int64).ravel()
        keys = np.asarray(keys, dtype=np.uint64).ravel()
        if weights is None:
            weights = np.ones(rows.size)
        weights = np.asarray(weights, dtype=np.float64).ravel()
        if rows.size == 0:
            return cls(n_rows, rows, keys, weights)
        order = np.lexsort((keys, rows))
        rows, keys, weights = rows[order], keys[order], weights[order]
        new = np.ones(rows.size, dtype=bool)
        new[1:] = (rows[1:] != rows[:-1]) | (keys[1:] != keys[:-1])
        starts = np.flatnonzero(new)
        return cls(n_rows, rows[starts], keys[starts], np.add.reduceat(weights, starts))

    @classmethod
    def from_word_keys(cls, keys: np.ndarray, numerosity: bool) -> KeyedRows:
        n, n_win = keys.shape
        rows = np.repeat(np.arange(n), n_win)
        flat = keys.ravel()
        if numerosity:
            keep = numerosity_mask(keys).ravel()
            rows, flat = rows[keep], flat[keep]
        return cls.from_occurrences(n, rows, flat)

    def l1_normalized(self) -> KeyedRows:
        mass = np.bincount(self.rows, weights=self.values, minlength=self.n_rows)
        mass[mass == 0] = 1.0
        return KeyedRows(self.n_rows, self.rows, self.keys, self.values / mass[self.rows])

    def vocabulary(self) -> np.ndarray:
        return np.unique(self.keys)

    def project(self, vocab: np.ndarray) -> ProjectedBags:
        """Express rows over ``vocab``; mass on unseen keys is kept as totals."""
        pos = np.searchsorted(vocab, self.keys)
        pos_c = np.minimum(pos, max(vocab.size - 1, 0))
        known = (pos < vocab.size) & (vocab[pos_c] == self.keys) if vocab.size else np.zeros(self.keys.size, bool)
        mat = sparse.csr_matrix(
            (self.values[known], (self.rows[known], pos[known])),
            shape=(self.n_rows, vocab.size),
        )
        sq = np.bincount(self.rows, weights=self.values**2, minlength=self.n_rows)
        mass = np.bincount(self.rows, weights=self.values, minlength=self.n_rows)
        return ProjectedBags(mat, sq, mass)

    def histograms(self) -> list[SparseHistogram]:
        out = [dict() for _ in range(self.n_rows)]
        for r, k, v in zip(self.rows.tolist(), self.keys.tolist(), self.values.tolist()):
            out[r][k] = int(v) if float(v).is_integer() else v
        return [SparseHistogram(d) for d in out]


@dataclass
class ProjectedBags:
    """Bags as a sparse matrix over a fixed vocabulary.

    ``sq`` and ``mass`` are per-row sums of squared values and of values over
    *all* keys, including those missing from the vocabulary.
    """

    matrix: sparse.csr_matrix
    sq: np.ndarray
    mass: np.ndarray

    @property
    def n_rows(self) -> int:
        return self.matrix.shape[0]


# -- text format ------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) or float(v).is_integer():
        return str(int(v))
    return f"{float(v):.17g}"


def format_bags(bags) -> str:
    """``label k key:count ...`` per line, keys ascending."""
    lines = []
    for bag, label in bags:
        items = sorted(bag.items())
        fields = [str(label), str(len(items))] + [f"{k}:{_fmt(v)}" for k, v in items]
        lines.append(" ".join(fields))
    return "\n".join(lines) + ("\n" if lines else "")


def _parse_value(s: str):
    try:
        return int(s)
    except ValueError:
        return float(s)


def parse_bags(text: str):
    """Inverse of :func:`format_bags`."""
    bags = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        fields = line.split()
        label, k = int(fields[0]), int(fields[1])
        if len(fields) - 2 != k:
            raise ValueError(f"line {lineno}: expected {k} entries, found {len(fields) - 2}")
        counts = {}
        for item in fields[2:]:
            key, val = item.rsplit(":", 1)
            counts[int(key)] = _parse_value(val)
        bags.append((SparseHistogram(counts), label))
    return bags

