"""Bag of temporal SIFT words (BOTSW).

Keypoints are sampled every ``r`` points. At each of several Gaussian
scales a keypoint is described by ``n_b`` blocks of ``a`` points; each block
contributes the Gaussian-weighted sums of its positive and of its negative
gradients. Descriptors are quantised against a k-means codebook and the
resulting histogram goes through signed square root and l2 normalisation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import ceil

import numpy as np

from .bagging import KeyedRows
from .classifiers import EnsembleMember, ensemble_predict, retain_ensemble, rows_loocv
from .distances import Measure

__all__ = [
    "KeypointDescriptor",
    "Codebook",
    "BotswParams",
    "sample_keypoints",
    "gaussian_filter",
    "gaussian_kernel",
    "describe_keypoint",
    "describe_series",
    "kmeans_fit",
    "botsw_bag",
    "BotswTransform",
    "BotswGrid",
    "build_botsw_ensemble",
    "BOTSW",
    "default_scales",
    "ssr_l2_normalize",
]


def default_scales(n_scales: int = 4) -> tuple:
    return tuple(1.6 * 2 ** (j / 2) for j in range(n_scales))


@dataclass(frozen=True)
class BotswParams:
    n_b: int = 4
    a: int = 4
    r: int = 4
    scales: tuple = field(default_factory=default_scales)

    def __post_init__(self):
        if self.n_b < 1 or self.a < 1 or self.r < 1:
            raise ValueError("n_b, a and r must all be >= 1")
        if not self.scales or min(self.scales) <= 0:
            raise ValueError("scales must be positive")


@dataclass(frozen=True)
class KeypointDescriptor:
    position: int
    scale: float
    vector: np.ndarray


def sample_keypoints(m: int, r: int) -> np.ndarray:
    """Regularly spaced keypoints ``0, r, 2r, ... < m`` (0-based indices)."""
    if r < 1:
        raise ValueError(f"sampling rate must be >= 1 (got {r})")
    return np.arange(0, m, r)


def gaussian_kernel(s: float) -> np.ndarray:
    """Sampled Gaussian of std ``s``, radius ``ceil(4 s)``, summing to 1."""
    if s <= 0:
        raise ValueError(f"filter width must be positive (got {s})")
    radius = int(ceil(4 * s))
    t = np.arange(-radius, radius + 1)
    k = np.exp(-(t**2) / (2.0 * s * s))
    return k / k.sum()


def gaussian_filter(series, s: float) -> np.ndarray:
    """Gaussian smoothing with mirror (``d c b a | a b c d``) boundaries."""
    x = np.asarray(series, dtype=np.float64)
    kernel = gaussian_kernel(s)
    radius = kernel.size // 2
    padded = np.pad(x, (radius, radius), mode="symmetric")
    return np.convolve(padded, kernel, mode="valid")


def _block_layout(n_b: int, a: int):
    span = n_b * a
    offsets = np.arange(span) - span // 2
    sigma = span / 2.0
    weights = np.exp(-(offsets**2) / (2.0 * sigma * sigma))
    return offsets, weights


def _describe(filtered: np.ndarray, positions: np.ndarray, n_b: int, a: int) -> np.ndarray:
    # filtered: (n, m) -> (n, n_kp, 2 n_b)
    offsets, weights = _block_layout(n_b, a)
    pad = int(np.abs(offsets).max()) + 1
    padded = np.pad(filtered, ((0, 0), (pad, pad)), mode="symmetric")
    grad = np.zeros_like(padded)
    grad[:, 1:-1] = (padded[:, 2:] - padded[:, :-2]) / 2.0
    idx = positions[:, None] + offsets[None, :] + pad
    g = grad[:, idx] * weights  # (n, n_kp, span)
    g = g.reshape(g.shape[0], g.shape[1], n_b, a)
    out = np.empty(g.shape[:2] + (2 * n_b,))
    out[..., 0::2] = np.where(g > 0, g, 0.0).sum(axis=-1)
    out[..., 1::2] = np.where(g < 0, g, 0.0).sum(axis=-1)
    return out


def describe_keypoint(filtered, pos: int, n_b: int, a: int) -> KeypointDescriptor:
    """Descriptor of one keypoint of an already filtered series.

    The ``n_b * a`` points around ``pos`` (mirrored past the ends) are split
    into ``n_b`` blocks. Central-difference gradients are weighted by a
    Gaussian of width ``n_b * a / 2`` centred on ``pos``; entry ``2i`` holds
    block ``i``'s positive sum and entry ``2i + 1`` its negative sum.
    """
    if n_b < 1 or a < 1:
        raise ValueError("n_b and a must be >= 1")
    x = np.asarray(filtered, dtype=np.float64)
    vec = _describe(x[None, :], np.array([int(pos)]), n_b, a)[0, 0]
    return KeypointDescriptor(int(pos), float("nan"), vec)


def describe_series(X, params: BotswParams) -> np.ndarray:
    """All descriptors, shape ``(n, n_keypoints * n_scales, 2 n_b)``."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    positions = sample_keypoints(X.shape[1], params.r)
    per_scale = []
    for s in params.scales:
        filtered = np.stack([gaussian_filter(x, s) for x in X])
        per_scale.append(_describe(filtered, positions, params.n_b, params.a))
    return np.concatenate(per_scale, axis=1)


@dataclass
class Codebook:
    centroids: np.ndarray
    inertia_history: list = field(default_factory=list)

    @property
    def k(self) -> int:
        return self.centroids.shape[0]

    def quantize(self, vectors: np.ndarray) -> np.ndarray:
        """Index of the nearest centroid (lowest index on ties)."""
        return _assign(np.asarray(vectors, dtype=np.float64), self.centroids)[0]

    def to_text(self) -> str:
        return "\n".join(" ".join(f"{v:.17g}" for v in row) for row in self.centroids) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Codebook:
        rows = [[float(v) for v in ln.split()] for ln in text.splitlines() if ln.strip()]
        return cls(np.array(rows, ndmin=2))


def _sq_dists(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    d = (X * X).sum(1)[:, None] - 2.0 * X @ C.T + (C * C).sum(1)[None, :]
    return np.maximum(d, 0.0)


def _assign(X, C):
    d = _sq_dists(X, C)
    lab = np.argmin(d, axis=1)
    return lab, d[np.arange(X.shape[0]), lab]


def _kmeans_pp(X: np.ndarray, k: int, rng) -> np.ndarray:
    n = X.shape[0]
    centres = [X[rng.integers(n)]]
    closest = _sq_dists(X, centres[0][None, :])[:, 0]
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            i = rng.choice(n, p=closest / total)
        else:
            i = rng.integers(n)
        centres.append(X[i])
        closest = np.minimum(closest, _sq_dists(X, X[i][None, :])[:, 0])
    return np.array(centres)


def kmeans_fit(vectors, k: int, seed: int = 0, max_iter: int = 100, init=None) -> Codebook:
    """Lloyd's k-means from a seeded k-means++ start.

    Stops once assignments no longer change or after ``max_iter`` rounds.
    An emptied cluster is moved onto the point farthest from its own
    centroid. ``inertia_history`` records the within-cluster sum of squares
    after every assignment step.
    """
    X = np.asarray(vectors, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("k-means needs a non-empty 2-d array of vectors")
    if k < 1:
        raise ValueError(f"k must be >= 1 (got {k})")
    rng = np.random.default_rng(seed)
    C = _kmeans_pp(X, k, rng) if init is None else np.array(init, dtype=np.float64)
    labels = None
    history = []
    for _ in range(max_iter):
        new_labels, dist = _assign(X, C)
        history.append(float(dist.sum()))
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        counts = np.bincount(labels, minlength=k)
        sums = np.zeros_like(C)
        np.add.at(sums, labels, X)
        filled = counts > 0
        C = C.copy()
        C[filled] = sums[filled] / counts[filled, None]
        if not filled.all():
            far = dist.copy()
            for j in np.flatnonzero(~filled):
                i = int(np.argmax(far))
                C[j] = X[i]
                far[i] = -1.0
    return Codebook(C, history)


def ssr_l2_normalize(hist: np.ndarray) -> np.ndarray:
    v = np.sign(hist) * np.sqrt(np.abs(hist))
    norm = np.linalg.norm(v, axis=-1, keepdims=True)
    return v / np.where(norm > 0, norm, 1.0)


def botsw_bag(series, codebook: Codebook, params: BotswParams) -> dict:
    """Normalised codeword histogram of one series as a ``{word: weight}`` dict."""
    desc = describe_series(np.asarray(series, dtype=np.float64)[None, :], params)[0]
    hist = np.bincount(codebook.quantize(desc), minlength=codebook.k).astype(np.float64)
    v = ssr_l2_normalize(hist)
    return {int(i): float(v[i]) for i in np.flatnonzero(v)}


class BotswTransform:
    def __init__(self, codebook: Codebook, params: BotswParams):
        self.codebook = codebook
        self.bparams = params

    @property
    def params(self) -> dict:
        p = self.bparams
        return dict(n_b=p.n_b, a=p.a, r=p.r, scales=list(p.scales), k=self.codebook.k)

    def rows_from_descriptors(self, desc: np.ndarray) -> KeyedRows:
        n, per, _ = desc.shape
        codes = self.codebook.quantize(desc.reshape(n * per, -1)).reshape(n, per)
        hist = np.zeros((n, self.codebook.k))
        np.add.at(hist, (np.repeat(np.arange(n), per), codes.ravel()), 1.0)
        v = ssr_l2_normalize(hist)
        rows, cols = np.nonzero(v)
        return KeyedRows(n, rows.astype(np.int64), cols.astype(np.uint64), v[rows, cols])

    def transform(self, X, cache: dict | None = None) -> KeyedRows:
        return self.rows_from_descriptors(describe_series(X, self.bparams))


@dataclass(frozen=True)
class BotswGrid:
    n_b: tuple = (4, 8, 12, 16, 20)
    a: tuple = (4, 8)
    k: tuple = (32, 64, 128, 256, 512, 1024)
    r: int = 4
    scales: tuple = field(default_factory=default_scales)


def build_botsw_ensemble(train, measure="boss", grid: BotswGrid | None = None, seed: int = 0):
    """Grid-search BOTSW cells by LOOCV 1-NN and keep those within 92% of the best.

    Codebooks are fitted on training descriptors only.
    """
    measure = Measure(measure)
    grid = grid if grid is not None else BotswGrid()
    X = np.asarray(train.X, dtype=np.float64)
    y = np.asarray(train.y, dtype=np.int64)
    if X.shape[0] == 0:
        raise ValueError("empty training set")
    members = []
    for n_b, a in itertools.product(sorted(grid.n_b), sorted(grid.a)):
        params = BotswParams(n_b, a, grid.r, tuple(grid.scales))
        desc = describe_series(X, params)
        flat = desc.reshape(-1, desc.shape[-1])
        for k in sorted(grid.k):
            tr = BotswTransform(kmeans_fit(flat, k, seed), params)
            rows = tr.rows_from_descriptors(desc)
            acc = rows_loocv(rows, y, measure) if len(y) > 1 else 1.0
            members.append(EnsembleMember(tr, rows, y, measure, acc))
    members.sort(key=lambda mb: (-mb.train_acc, mb.params["n_b"], mb.params["a"], mb.params["k"]))
    return retain_ensemble(members, ensemble=True)


class BOTSW:
    """BOTSW ensemble estimator (``measure='boss'`` or ``'hi'``)."""

    def __init__(self, measure="boss", grid: BotswGrid | None = None, seed: int = 0):
        self.measure = measure
        self.grid = grid
        self.seed = seed

    def fit(self, X, y=None):
        from .classifiers import _as_dataset

        data = _as_dataset(X, y)
        self.n_classes_ = int(np.max(data.y)) + 1
        self.members_ = build_botsw_ensemble(data, self.measure, self.grid, self.seed)
        return self

    def predict(self, X) -> np.ndarray:
        return ensemble_predict(X, self.members_, self.n_classes_)

    def score(self, X, y) -> float:
        return float(np.mean(self.predict(X) == np.asarray(y)))
