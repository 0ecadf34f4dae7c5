"""Window approximation and discretisation.

Turns real-valued windows into short integer words. Two approximations are
provided (piecewise aggregate approximation and a truncated DFT) and two
discretisers (fixed normal-quantile breakpoints and multiple coefficient
binning, MCB). Scalar helpers operate on one window; the ``*_batch``
helpers operate on stacks of windows and back the bagging loop.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import ceil

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.stats import norm

__all__ = [
    "BreakpointTable",
    "paa",
    "gaussian_breakpoints",
    "sax_word",
    "dft_truncate",
    "mcb_fit",
    "mcb_discretise",
    "encode_word",
    "decode_word",
    "znormalize",
]

# windows whose standard deviation falls below this are treated as flat
STD_EPS = 1e-8


def _check_window(window) -> np.ndarray:
    x = np.asarray(window, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("window must be one-dimensional")
    if x.size < 2:
        raise ValueError(f"window length must be >= 2 (got {x.size})")
    if not np.all(np.isfinite(x)):
        raise ValueError("window contains non-finite values")
    return x


def _check_alpha(alpha: int) -> int:
    if int(alpha) != alpha or alpha < 2:
        raise ValueError(f"alphabet size must be an integer >= 2 (got {alpha})")
    return int(alpha)


@lru_cache(maxsize=256)
def _paa_matrix(w: int, l: int) -> np.ndarray:
    # sample j covers [j*l, (j+1)*l), chunk i covers [i*w, (i+1)*w) once both
    # axes are scaled by l*w; integer arithmetic keeps fractional bounds exact
    j = np.arange(w)[:, None]
    i = np.arange(l)[None, :]
    lo = np.maximum(j * l, i * w)
    hi = np.minimum((j + 1) * l, (i + 1) * w)
    overlap = np.clip(hi - lo, 0, None)
    mat = overlap / w
    mat.setflags(write=False)
    return mat


def paa(window, l: int) -> np.ndarray:
    """Piecewise aggregate approximation of ``window`` down to ``l`` values.

    When ``l`` does not divide the window length, samples straddling a chunk
    boundary contribute to both chunks in proportion to their overlap.
    """
    x = _check_window(window)
    return paa_batch(x[None, :], l)[0]


def paa_batch(windows: np.ndarray, l: int) -> np.ndarray:
    w = windows.shape[-1]
    if int(l) != l or l < 1 or l > w:
        raise ValueError(f"word length must satisfy 1 <= l <= w (got l={l}, w={w})")
    return windows @ _paa_matrix(w, int(l))


@lru_cache(maxsize=64)
def gaussian_breakpoints(alpha: int) -> np.ndarray:
    """Standard-normal quantiles splitting the real line into ``alpha`` bins."""
    alpha = _check_alpha(alpha)
    bp = norm.ppf(np.arange(1, alpha) / alpha)
    # force exact antisymmetry (ppf is only symmetric to rounding)
    bp = 0.5 * (bp - bp[::-1])
    bp.setflags(write=False)
    return bp


def znormalize(windows: np.ndarray) -> np.ndarray:
    """Z-normalise along the last axis; flat windows map to all zeros."""
    windows = np.asarray(windows, dtype=np.float64)
    mu = windows.mean(axis=-1, keepdims=True)
    sd = windows.std(axis=-1, keepdims=True)
    centred = windows - mu
    flat = sd < STD_EPS
    return np.where(flat, 0.0, centred / np.where(flat, 1.0, sd))


def sax_word(window, l: int, alpha: int) -> np.ndarray:
    """SAX word of a single window: z-normalise, PAA, then bin.

    Returns the symbol array; use :func:`encode_word` for the packed key.
    """
    x = _check_window(window)
    alpha = _check_alpha(alpha)
    approx = paa(znormalize(x), l)
    return np.searchsorted(gaussian_breakpoints(alpha), approx, side="left")


@lru_cache(maxsize=512)
def _dft_basis(w: int, n_freq: int) -> np.ndarray:
    # columns: Re q_0, Im q_0, Re q_1, Im q_1, ...
    j = np.arange(w)[:, None]
    k = np.arange(n_freq)[None, :]
    # reduce jk mod w before scaling so large products keep full precision
    r = (j * k) % w
    angle = 2.0 * np.pi * r / w
    cos, sin = np.cos(angle), np.sin(angle)
    # exact values at quarter turns, so integer data gives integer coefficients
    quarter = (4 * r) % w == 0
    q = (4 * r // w) % 4
    cos[quarter] = np.array([1.0, 0.0, -1.0, 0.0])[q[quarter]]
    sin[quarter] = np.array([0.0, 1.0, 0.0, -1.0])[q[quarter]]
    basis = np.empty((w, 2 * n_freq))
    basis[:, 0::2] = cos
    basis[:, 1::2] = -sin
    basis.setflags(write=False)
    return basis


def _check_dft_params(w: int, l: int, p: bool) -> None:
    if int(l) != l or l < 2 or l % 2:
        raise ValueError(f"DFT word length must be a positive even integer (got {l})")
    if l // 2 + (1 if p else 0) > w:
        raise ValueError(f"too many Fourier coefficients ({l // 2}) for window length {w}")


def dft_truncate(window, l: int, p: bool) -> np.ndarray:
    """First ``l/2`` complex DFT coefficients, interleaved as (Re, Im) pairs.

    The transform is unnormalised. With ``p`` true the zero-frequency term is
    skipped so the result is invariant to a constant offset; otherwise the
    output starts at ``q_0`` (whose imaginary part is always 0).
    """
    x = _check_window(window)
    return dft_batch(x[None, :], l, p)[0]


def dft_batch(windows: np.ndarray, l: int, p: bool) -> np.ndarray:
    w = windows.shape[-1]
    _check_dft_params(w, l, p)
    start = 1 if p else 0
    basis = _dft_basis(w, l // 2 + start)
    return windows @ basis[:, 2 * start:]


def encode_word(symbols, alpha: int) -> int:
    """Pack symbols into ``sum(symbols[i] * alpha**i)``."""
    alpha = _check_alpha(alpha)
    symbols = [int(s) for s in symbols]
    if alpha ** len(symbols) > 2**64:
        raise ValueError("alpha**l exceeds the 64-bit key space")
    key = 0
    for s in reversed(symbols):
        if not 0 <= s < alpha:
            raise ValueError(f"symbol {s} outside [0, {alpha})")
        key = key * alpha + s
    return key


def decode_word(key: int, l: int, alpha: int) -> list[int]:
    alpha = _check_alpha(alpha)
    key = int(key)
    out = []
    for _ in range(l):
        key, s = divmod(key, alpha)
        out.append(s)
    if key:
        raise ValueError("key does not fit in the given word length")
    return out


def word_keys(symbols: np.ndarray, alpha: int) -> np.ndarray:
    """Vectorised :func:`encode_word` over the last axis (uint64 result)."""
    l = symbols.shape[-1]
    if alpha**l > 2**64:
        raise ValueError("alpha**l exceeds the 64-bit key space")
    powers = np.array([alpha**i for i in range(l)], dtype=np.uint64)
    return (symbols.astype(np.uint64) * powers).sum(axis=-1, dtype=np.uint64)


def prefix_word_keys(symbols: np.ndarray, alpha: int) -> np.ndarray:
    """Keys of every prefix of the words in ``symbols``.

    ``out[..., i]`` is the key of ``symbols[..., :i + 1]``.
    """
    l = symbols.shape[-1]
    if alpha**l > 2**64:
        raise ValueError("alpha**l exceeds the 64-bit key space")
    powers = np.array([alpha**i for i in range(l)], dtype=np.uint64)
    return np.cumsum(symbols.astype(np.uint64) * powers, axis=-1, dtype=np.uint64)


@dataclass(frozen=True, eq=False)
class BreakpointTable:
    """Per-position bin thresholds, shape ``(l, alpha - 1)``.

    A value equal to a breakpoint falls into the lower bin.
    """

    rows: np.ndarray

    def __post_init__(self):
        rows = np.array(self.rows, dtype=np.float64, ndmin=2)
        if rows.ndim != 2 or rows.shape[1] < 1:
            raise ValueError("breakpoint table must be a 2-d array with >= 1 column")
        if np.any(np.diff(rows, axis=1) < 0):
            raise ValueError("breakpoint rows must be non-decreasing")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def word_length(self) -> int:
        return self.rows.shape[0]

    @property
    def alpha(self) -> int:
        return self.rows.shape[1] + 1

    @classmethod
    def gaussian(cls, l: int, alpha: int) -> BreakpointTable:
        return cls(np.tile(gaussian_breakpoints(alpha), (l, 1)))

    def head(self, l: int) -> BreakpointTable:
        """Table restricted to the first ``l`` positions."""
        return BreakpointTable(self.rows[:l])

    def discretise(self, coeffs: np.ndarray) -> np.ndarray:
        """Bin an ``(..., l)`` array of coefficients position by position."""
        coeffs = np.asarray(coeffs, dtype=np.float64)
        if coeffs.shape[-1] != self.word_length:
            raise ValueError(
                f"expected {self.word_length} coefficients, got {coeffs.shape[-1]}"
            )
        out = np.empty(coeffs.shape, dtype=np.int64)
        for i, row in enumerate(self.rows):
            out[..., i] = np.searchsorted(row, coeffs[..., i], side="left")
        return out

    def to_text(self) -> str:
        lines = (" ".join(f"{v:.17g}" for v in row) for row in self.rows)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> BreakpointTable:
        rows = [[float(v) for v in line.split()] for line in text.splitlines() if line.strip()]
        return cls(np.array(rows))

    def __eq__(self, other):
        if not isinstance(other, BreakpointTable):
            return NotImplemented
        return self.rows.shape == other.rows.shape and np.array_equal(self.rows, other.rows)

    def __hash__(self):
        return hash(self.rows.tobytes())


def equi_depth_breakpoints(values: np.ndarray, alpha: int) -> np.ndarray:
    """Equi-depth thresholds of a pooled sample.

    Breakpoint ``j`` (0-based) is the sorted value at 1-based rank
    ``ceil((j + 1) * n / alpha)``.
    """
    alpha = _check_alpha(alpha)
    v = np.sort(np.asarray(values, dtype=np.float64))
    n = v.size
    if n == 0:
        raise ValueError("cannot fit breakpoints on an empty sample")
    ranks = np.array([ceil((j + 1) * n / alpha) for j in range(alpha - 1)])
    return v[ranks - 1]


def disjoint_windows(X: np.ndarray, w: int) -> np.ndarray:
    """Non-overlapping stride-``w`` windows of every row; trailing partial dropped."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    n_win = X.shape[1] // w
    return X[:, : n_win * w].reshape(-1, w)


def sliding_windows(X: np.ndarray, w: int) -> np.ndarray:
    """All length-``w`` windows, shape ``(n, m - w + 1, w)`` (a read-only view)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if w > X.shape[1]:
        raise ValueError(f"window exceeds series length ({w} > {X.shape[1]})")
    return sliding_window_view(X, w, axis=1)


def mcb_fit(train, w: int, l: int, alpha: int, p: bool) -> BreakpointTable:
    """Fit MCB breakpoints on the truncated DFT of disjoint training windows.

    ``train`` is a :class:`~tsdict.data.LabeledDataset` or an ``(n, m)``
    array. Row ``i`` of the result holds the equi-depth breakpoints of the
    ``i``-th coefficient pooled over all windows.
    """
    X = getattr(train, "X", train)
    X = np.asarray(X, dtype=np.float64)
    if X.size == 0:
        raise ValueError("cannot fit MCB on an empty training set")
    _check_alpha(alpha)
    if X.ndim != 2 or X.shape[1] < w:
        raise ValueError(f"window exceeds series length ({w} > {X.shape[-1]})")
    coeffs = dft_batch(disjoint_windows(X, w), l, p)
    return fit_breakpoints(coeffs, alpha)


def fit_breakpoints(coeffs: np.ndarray, alpha: int) -> BreakpointTable:
    """Equi-depth table from a pooled ``(n_windows, l)`` coefficient sample."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.shape[0] == 0:
        raise ValueError("cannot fit breakpoints on an empty sample")
    return BreakpointTable(
        np.stack([equi_depth_breakpoints(coeffs[:, i], alpha) for i in range(coeffs.shape[1])])
    )


def mcb_discretise(coeffs, table: BreakpointTable) -> np.ndarray:
    """Symbol ``i`` counts the breakpoints in row ``i`` strictly below ``coeffs[i]``."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.ndim != 1:
        raise ValueError("coeffs must be one-dimensional")
    return table.discretise(coeffs)
