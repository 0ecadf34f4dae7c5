"""Nearest-neighbour dictionary classifiers.

One configurable classifier covers BOP, BOSS and every component swap
between them: the approximation (PAA or truncated DFT), the discretiser
(Gaussian breakpoints or MCB), the histogram measure and whether the best
parameter sets are ensembled. SAXVSM is provided alongside.

Tie rules, used everywhere so that resample runs are reproducible:

* nearest neighbour: the earliest reference wins;
* ensemble vote: the lowest class index wins;
* parameter cells of equal accuracy: ascending ``(w, l, p, alpha)``.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from math import log

import numpy as np

from .bagging import (
    Approx,
    BagConfig,
    Disc,
    KeyedRows,
    ProjectedBags,
    SparseHistogram,
    approximate,
    bag_dataset,
    fit_discretiser,
)
from .distances import (
    Measure,
    boss_distance,
    closeness,
    cosine_similarity,
    euclidean_sq,
    histogram_intersection,
    pairwise,
)
from .symbolic import BreakpointTable, prefix_word_keys, sliding_windows, word_keys

log_ = logging.getLogger(__name__)

__all__ = [
    "ParameterGrid",
    "DictionaryConfig",
    "EnsembleMember",
    "WordTransform",
    "nn_classify",
    "loocv_accuracy",
    "grid_search",
    "retain_ensemble",
    "ensemble_classify",
    "ensemble_predict",
    "tfidf_weight",
    "saxvsm_build",
    "DictionaryClassifier",
    "SAXVSM",
    "VARIANTS",
    "make_variant",
    "RETAIN_FRACTION",
]

RETAIN_FRACTION = 0.92

_SCALAR = {
    Measure.EUCLID: euclidean_sq,
    Measure.BOSS: boss_distance,
    Measure.HI: histogram_intersection,
    Measure.COSINE: cosine_similarity,
}


@dataclass(frozen=True)
class ParameterGrid:
    """Search space. ``windows=None`` means every length from 10 to ``m``."""

    windows: tuple | None = None
    word_lengths: tuple = (8, 10, 12, 14, 16)
    alphas: tuple = (4,)
    p_values: tuple = (True, False)
    min_window: int = 10

    def __post_init__(self):
        for name in ("word_lengths", "alphas", "p_values"):
            vals = tuple(getattr(self, name))
            if not vals:
                raise ValueError(f"parameter grid: {name} is empty")
            object.__setattr__(self, name, vals)
        if self.windows is not None:
            if not tuple(self.windows):
                raise ValueError("parameter grid: windows is empty")
            object.__setattr__(self, "windows", tuple(int(w) for w in self.windows))

    def window_lengths(self, m: int) -> list[int]:
        if self.windows is None:
            return list(range(min(self.min_window, m), m + 1))
        return sorted(w for w in set(self.windows) if w <= m)


@dataclass(frozen=True)
class DictionaryConfig:
    approx: Approx = Approx.DFT
    disc: Disc = Disc.MCB
    measure: Measure = Measure.BOSS
    ensemble: bool = True
    grid: ParameterGrid = field(default_factory=ParameterGrid)
    numerosity: bool = True

    def __post_init__(self):
        object.__setattr__(self, "approx", Approx(self.approx))
        object.__setattr__(self, "disc", Disc(self.disc))
        object.__setattr__(self, "measure", Measure(self.measure))


# -- transforms ---------------------------------------------------------------


class WordTransform:
    """Series -> bag rows for one parameter cell.

    ``table`` may have more rows than ``cfg.l``: DFT words of length ``l``
    are prefixes of longer ones, so members sharing ``(w, p, alpha)`` share
    one table and one coefficient computation per call of
    :func:`ensemble_predict`.
    """

    def __init__(self, cfg: BagConfig, table: BreakpointTable):
        if table.word_length < cfg.l:
            raise ValueError("breakpoint table shorter than the word length")
        self.cfg = cfg
        self.table = table

    @property
    def own_table(self) -> BreakpointTable:
        return self.table if self.table.word_length == self.cfg.l else self.table.head(self.cfg.l)

    @property
    def params(self) -> dict:
        c = self.cfg
        return dict(
            w=c.w, l=c.l, alpha=c.alpha, p=c.p, approx=c.approx.value, disc=c.disc.value, numerosity=c.numerosity
        )

    def word_keys(self, X: np.ndarray, cache: dict | None = None) -> np.ndarray:
        cfg = self.cfg
        if cfg.approx is Approx.DFT:
            key = ("dft", id(self.table), cfg.w, cfg.p, cfg.alpha, cfg.disc)
            prefix = cache.get(key) if cache is not None else None
            if prefix is None:
                full = replace(cfg, l=self.table.word_length)
                coeffs = approximate(sliding_windows(X, cfg.w), full)
                prefix = prefix_word_keys(self.table.discretise(coeffs), cfg.alpha)
                if cache is not None:
                    cache[key] = prefix
            return prefix[..., cfg.l - 1]
        coeffs = approximate(sliding_windows(X, cfg.w), cfg)
        return word_keys(self.own_table.discretise(coeffs), cfg.alpha)

    def transform(self, X: np.ndarray, cache: dict | None = None) -> KeyedRows:
        return KeyedRows.from_word_keys(self.word_keys(X, cache), self.cfg.numerosity)


@dataclass
class EnsembleMember:
    """One fitted parameter cell: its transform, training bags and accuracy."""

    transform: object
    train_rows: KeyedRows
    labels: np.ndarray
    measure: Measure
    train_acc: float
    vocab: np.ndarray = field(init=False, repr=False)
    train_bags: ProjectedBags = field(init=False, repr=False)

    def __post_init__(self):
        self.measure = Measure(self.measure)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self.vocab = self.train_rows.vocabulary()
        self.train_bags = self.train_rows.project(self.vocab)

    @property
    def params(self) -> dict:
        return self.transform.params

    @property
    def disc_model(self):
        return getattr(self.transform, "own_table", None)

    def bags(self) -> list[tuple[SparseHistogram, int]]:
        return list(zip(self.train_rows.histograms(), self.labels.tolist()))

    def predict(self, X: np.ndarray, cache: dict | None = None) -> np.ndarray:
        q = self.transform.transform(X, cache).project(self.vocab)
        d = closeness(pairwise(q, self.train_bags, self.measure), self.measure)
        return self.labels[np.argmin(d, axis=1)]


# -- scalar operations ----------------------------------------------------------


def nn_classify(query, refs: Sequence, measure) -> int:
    """Label of the closest reference; the earliest one wins ties."""
    if not refs:
        raise ValueError("nearest-neighbour search needs at least one reference")
    measure = Measure(measure)
    fn = _SCALAR[measure]
    best, best_label = None, None
    for ref, label in refs:
        v = fn(query, ref)
        v = -v if measure.is_similarity else v
        if best is None or v < best:
            best, best_label = v, label
    return best_label


def loocv_accuracy(bags: Sequence, measure) -> float:
    """Leave-one-out 1-NN accuracy over ``(bag, label)`` pairs."""
    if len(bags) < 2:
        raise ValueError("leave-one-out needs at least two bags")
    correct = 0
    for i, (bag, label) in enumerate(bags):
        others = [b for j, b in enumerate(bags) if j != i]
        correct += nn_classify(bag, others, measure) == label
    return correct / len(bags)


def _loocv_from_matrix(d: np.ndarray, labels: np.ndarray) -> float:
    d = d.copy()
    np.fill_diagonal(d, np.inf)
    return float(np.mean(labels[np.argmin(d, axis=1)] == labels))


def rows_loocv(rows: KeyedRows, labels: np.ndarray, measure: Measure) -> float:
    if rows.n_rows < 2:
        raise ValueError("leave-one-out needs at least two bags")
    p = rows.project(rows.vocabulary())
    return _loocv_from_matrix(closeness(pairwise(p, p, measure), measure), labels)


def retain_ensemble(members: Sequence, ensemble: bool = True, fraction: float = RETAIN_FRACTION):
    """Members with ``train_acc >= fraction * best``; only the best if not ensembling.

    ``members`` must already be sorted by accuracy, best first.
    """
    members = list(members)
    if not members:
        return []
    if not ensemble:
        return members[:1]
    threshold = fraction * members[0].train_acc
    kept = []
    for m in members:
        if m.train_acc < threshold:
            break
        kept.append(m)
    return kept


def _vote(votes: np.ndarray, n_classes: int) -> np.ndarray:
    # votes: (n_members, n_queries); argmax returns the lowest index on ties
    counts = np.zeros((votes.shape[1], n_classes), dtype=np.int64)
    for row in votes:
        counts[np.arange(votes.shape[1]), row] += 1
    return counts.argmax(axis=1)


def ensemble_predict(X, members: Sequence, n_classes: int | None = None) -> np.ndarray:
    """Majority vote of every member's 1-NN prediction for each row of ``X``."""
    if not members:
        raise ValueError("empty ensemble")
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if n_classes is None:
        n_classes = int(max(m.labels.max() for m in members)) + 1
    cache: dict = {}
    votes = np.stack([m.predict(X, cache) for m in members])
    return _vote(votes, n_classes)


def ensemble_classify(query_series, members: Sequence, n_classes: int | None = None) -> int:
    return int(ensemble_predict(np.asarray(query_series)[None, :], members, n_classes)[0])


# -- grid search ------------------------------------------------------------------


def _window_cells(X, w, cfg: DictionaryConfig):
    """Yield ``(bag_config, table, keys)`` for every valid cell of window ``w``."""
    grid = cfg.grid
    for alpha in grid.alphas:
        if cfg.approx is Approx.PAA:
            # p has no meaning for PAA; one pass per word length
            for l in sorted(set(grid.word_lengths)):
                if not 1 <= l <= w:
                    continue
                bc = BagConfig(w, l, alpha, False, cfg.approx, cfg.disc, cfg.numerosity)
                table = fit_discretiser(X, bc)
                yield bc, table, WordTransform(bc, table).word_keys(X)
            continue
        for p in sorted(set(grid.p_values)):
            ls = sorted(l for l in set(grid.word_lengths) if l >= 2 and l % 2 == 0 and l // 2 + p <= w)
            if not ls:
                continue
            full = BagConfig(w, ls[-1], alpha, p, cfg.approx, cfg.disc, cfg.numerosity)
            table = fit_discretiser(X, full)
            coeffs = approximate(sliding_windows(X, w), full)
            prefix = prefix_word_keys(table.discretise(coeffs), alpha)
            for l in ls:
                yield replace(full, l=l), table, prefix[..., l - 1]


def _cell_sort_key(acc, bc: BagConfig):
    return (-acc, bc.w, bc.l, bc.p, bc.alpha)


def _score_window(X, y, w, cfg):
    out = []
    for bc, table, keys in _window_cells(X, w, cfg):
        rows = KeyedRows.from_word_keys(keys, bc.numerosity)
        out.append((rows_loocv(rows, y, cfg.measure), bc))
    return out


def _map(fn, items, n_jobs):
    if n_jobs is None or n_jobs <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n_jobs) as ex:
        return list(ex.map(fn, items))


def score_grid(X, y, cfg: DictionaryConfig, n_jobs: int = 1):
    """LOOCV accuracy of every grid cell, sorted best first."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    windows = cfg.grid.window_lengths(X.shape[1])
    if not windows:
        raise ValueError(f"no grid window fits series of length {X.shape[1]}")
    scored = [s for chunk in _map(lambda w: _score_window(X, y, w, cfg), windows, n_jobs) for s in chunk]
    if not scored:
        raise ValueError("parameter grid has no valid cell")
    scored.sort(key=lambda s: _cell_sort_key(*s))
    return scored


def _materialize(X, y, scored, cfg: DictionaryConfig) -> list[EnsembleMember]:
    """Build members for ``(acc, bag_config)`` pairs, sharing tables per window group."""
    groups: dict = {}
    for acc, bc in scored:
        groups.setdefault((bc.w, bc.p, bc.alpha), []).append((acc, bc))
    built = {}
    for (w, p, alpha), cells in groups.items():
        if cfg.approx is Approx.DFT:
            full = replace(cells[0][1], l=max(bc.l for _, bc in cells))
            table = fit_discretiser(X, full)
            cache: dict = {}
            for acc, bc in cells:
                tr = WordTransform(bc, table)
                built[bc] = EnsembleMember(tr, tr.transform(X, cache), y, cfg.measure, acc)
        else:
            for acc, bc in cells:
                tr = WordTransform(bc, fit_discretiser(X, bc))
                built[bc] = EnsembleMember(tr, tr.transform(X), y, cfg.measure, acc)
    return [built[bc] for _, bc in scored]


def grid_search(train, cfg: DictionaryConfig, n_jobs: int = 1) -> list[EnsembleMember]:
    """Every grid cell as a fitted member, best LOOCV accuracy first."""
    scored = score_grid(train.X, train.y, cfg, n_jobs)
    return _materialize(np.asarray(train.X, dtype=np.float64), np.asarray(train.y), scored, cfg)


# -- SAXVSM -------------------------------------------------------------------------


def tfidf_weight(tf, df, c) -> float:
    """``ln(1 + tf) * ln(c / df)``, or 0 when the word occurs in no class."""
    if df <= 0:
        return 0.0
    return log(1 + tf) * log(c / df)


def saxvsm_build(train, w: int, l: int, alpha: int = 4, numerosity: bool = True):
    """Per-class tf-idf vectors (dicts) over pooled SAX bags.

    Returns ``(class_vectors, config)``.
    """
    n_classes = int(train.y.max()) + 1 if len(train.y) else 0
    counts = np.bincount(train.y, minlength=n_classes)
    if n_classes == 0 or np.any(counts == 0):
        raise ValueError("every class needs at least one training series")
    cfg = BagConfig(w, l, alpha, False, Approx.PAA, Disc.GAUSSIAN, numerosity)
    bags, _ = bag_dataset(train, cfg)
    tf = [dict() for _ in range(n_classes)]
    for bag, label in bags:
        for k, v in bag.items():
            tf[label][k] = tf[label].get(k, 0) + v
    df: dict = {}
    for t in tf:
        for k in t:
            df[k] = df.get(k, 0) + 1
    vectors = []
    for t in tf:
        vec = {k: tfidf_weight(v, df[k], n_classes) for k, v in t.items()}
        vectors.append({k: v for k, v in vec.items() if v != 0})
    return vectors, cfg


class SAXVSM:
    """Class-level tf-idf vectors compared to test bags by cosine similarity."""

    def __init__(self, window: int, word_length: int, alpha: int = 4, numerosity: bool = True):
        self.window = window
        self.word_length = word_length
        self.alpha = alpha
        self.numerosity = numerosity

    def fit(self, X, y=None):
        data = _as_dataset(X, y)
        self.class_vectors_, self.config_ = saxvsm_build(
            data, self.window, self.word_length, self.alpha, self.numerosity
        )
        self.n_classes_ = len(self.class_vectors_)
        return self

    def _similarities(self, bag):
        sims = []
        for vec in self.class_vectors_:
            try:
                sims.append(cosine_similarity(bag, vec))
            except ValueError:
                sims.append(0.0)
        return np.array(sims)

    def predict(self, X) -> np.ndarray:
        from .bagging import bag_series

        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        return np.array([int(np.argmax(self._similarities(bag_series(x, self.config_)))) for x in X])

    def score(self, X, y) -> float:
        return float(np.mean(self.predict(X) == np.asarray(y)))


# -- estimator ------------------------------------------------------------------------


def _as_dataset(X, y=None):
    if y is None:
        return X
    from .data import LabeledDataset

    return LabeledDataset(X, y)


class DictionaryClassifier:
    """BOP/BOSS-family classifier over one :class:`DictionaryConfig`.

    Parameters
    ----------
    config : DictionaryConfig
        The four component choices plus the search grid.
    max_ensemble : int, optional
        Keep at most this many retained members (highest accuracy first).
    n_jobs : int
        Worker threads for the grid search; results do not depend on it.
    """

    def __init__(self, config: DictionaryConfig | None = None, max_ensemble: int | None = None, n_jobs: int = 1):
        self.config = config if config is not None else DictionaryConfig()
        self.max_ensemble = max_ensemble
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        data = _as_dataset(X, y)
        Xa = np.asarray(data.X, dtype=np.float64)
        ya = np.asarray(data.y, dtype=np.int64)
        self.n_classes_ = int(ya.max()) + 1
        scored = score_grid(Xa, ya, self.config, self.n_jobs)
        kept = retain_ensemble([_Scored(a, bc) for a, bc in scored], self.config.ensemble)
        if self.max_ensemble is not None:
            kept = kept[: self.max_ensemble]
        self.members_ = _materialize(Xa, ya, [(k.train_acc, k.cfg) for k in kept], self.config)
        self.n_cells_ = len(scored)
        log_.debug("retained %d of %d cells", len(self.members_), len(scored))
        return self

    def predict(self, X) -> np.ndarray:
        return ensemble_predict(X, self.members_, self.n_classes_)

    def score(self, X, y) -> float:
        return float(np.mean(self.predict(X) == np.asarray(y)))


@dataclass
class _Scored:
    train_acc: float
    cfg: BagConfig


VARIANTS = {
    "BOP": (Approx.PAA, Disc.GAUSSIAN, Measure.EUCLID, False),
    "BOP+FT": (Approx.DFT, Disc.GAUSSIAN, Measure.EUCLID, False),
    "BOP+MCB": (Approx.PAA, Disc.MCB, Measure.EUCLID, False),
    "BOP+BD": (Approx.PAA, Disc.GAUSSIAN, Measure.BOSS, False),
    "BOP+Ens": (Approx.PAA, Disc.GAUSSIAN, Measure.EUCLID, True),
    "BOSS": (Approx.DFT, Disc.MCB, Measure.BOSS, True),
    "BOSS-FT": (Approx.PAA, Disc.MCB, Measure.BOSS, True),
    "BOSS-MCB": (Approx.DFT, Disc.GAUSSIAN, Measure.BOSS, True),
    "BOSS-BD": (Approx.DFT, Disc.MCB, Measure.EUCLID, True),
    "BOSS-Ens": (Approx.DFT, Disc.MCB, Measure.BOSS, False),
}


def variant_config(name: str, grid: ParameterGrid | None = None) -> DictionaryConfig:
    key = name.replace("−", "-").strip()
    lookup = {k.lower(): k for k in VARIANTS}
    if key.lower() not in lookup:
        raise KeyError(f"unknown variant {name!r}; choose from {', '.join(VARIANTS)}")
    approx, disc, measure, ens = VARIANTS[lookup[key.lower()]]
    return DictionaryConfig(approx, disc, measure, ens, grid if grid is not None else ParameterGrid())


def make_variant(name: str, grid: ParameterGrid | None = None, **kwargs) -> DictionaryClassifier:
    """Classifier for one of the ten BOP/BOSS component-swap variants."""
    return DictionaryClassifier(variant_config(name, grid), **kwargs)
