"""Datasets: UCR text I/O, stratified resampling and synthetic dictionary data."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "LabeledDataset",
    "read_ucr",
    "read_ucr_split",
    "write_ucr",
    "stratified_resample",
    "generate_dictionary_data",
    "SHAPELET_LENGTH",
]


class ParseError(ValueError):
    """Malformed dataset file; the message names the offending line."""


@dataclass
class LabeledDataset:
    """Equal-length univariate series with 0-based integer labels.

    ``classes[i]`` is the original label string of class ``i``.
    """

    X: np.ndarray
    y: np.ndarray
    name: str = ""
    classes: tuple = ()
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=np.float64))
        self.y = np.asarray(self.y, dtype=np.int64)
        if self.X.shape[0] != self.y.shape[0]:
            raise ValueError("X and y disagree on the number of series")
        if self.y.size and self.y.min() < 0:
            raise ValueError("labels must be non-negative integers")
        if not self.classes:
            n_classes = int(self.y.max()) + 1 if self.y.size else 0
            self.classes = tuple(str(c) for c in range(n_classes))
        self.classes = tuple(self.classes)

    def __len__(self):
        return self.X.shape[0]

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @property
    def series_length(self) -> int:
        return self.X.shape[1]

    def subset(self, idx) -> LabeledDataset:
        return LabeledDataset(self.X[idx], self.y[idx], self.name, self.classes)


def _label_order(labels):
    try:
        return sorted(set(labels), key=float)
    except ValueError:
        return sorted(set(labels))


def _parse_rows(path: Path):
    text = path.read_text()
    lines = [(i, ln.strip()) for i, ln in enumerate(text.splitlines(), 1) if ln.strip()]
    if not lines:
        raise ParseError(f"{path}: empty file")
    first = lines[0][1]
    if "," in first:
        split = lambda s: s.split(",")
    elif "\t" in first:
        split = lambda s: s.split("\t")
    else:
        split = lambda s: re.split(r"\s+", s)
    labels, rows, m = [], [], None
    for lineno, ln in lines:
        fields = [f.strip() for f in split(ln)]
        label, vals = fields[0], fields[1:]
        if m is None:
            m = len(vals)
            if m == 0:
                raise ParseError(f"{path}:{lineno}: no values after the label")
        elif len(vals) != m:
            raise ParseError(f"{path}:{lineno}: expected {m} values, found {len(vals)}")
        try:
            row = [float(v) for v in vals]
        except ValueError as err:
            raise ParseError(f"{path}:{lineno}: non-numeric field ({err})") from None
        if not np.all(np.isfinite(row)):
            raise ParseError(f"{path}:{lineno}: missing or non-finite value")
        # UCR files write integer labels as floats now and then ("1.0000000e+00")
        try:
            f = float(label)
            label = str(int(f)) if f.is_integer() else label
        except ValueError:
            pass
        labels.append(label)
        rows.append(row)
    return labels, np.array(rows)


def read_ucr(path, classes=None, name=None) -> LabeledDataset:
    """Read a UCR-format file (label then values, comma/tab/space separated).

    Labels are mapped to ``0..c-1`` in sorted order of the original labels,
    unless ``classes`` fixes the order (needed to read a test split with the
    mapping of its training split).
    """
    path = Path(path)
    labels, X = _parse_rows(path)
    if classes is None:
        classes = _label_order(labels)
    index = {c: i for i, c in enumerate(classes)}
    unknown = sorted(set(labels) - index.keys())
    if unknown:
        raise ParseError(f"{path}: labels {unknown} not among the known classes")
    y = np.array([index[c] for c in labels])
    if name is None:
        name = re.sub(r"_(TRAIN|TEST)$", "", path.stem, flags=re.I)
    return LabeledDataset(X, y, name, tuple(classes))


def read_ucr_split(train_path, test_path):
    """Read a train/test pair with one shared label mapping."""
    tr_labels, _ = _parse_rows(Path(train_path))
    te_labels, _ = _parse_rows(Path(test_path))
    classes = _label_order(tr_labels + te_labels)
    train = read_ucr(train_path, classes)
    test = read_ucr(test_path, classes, name=train.name)
    if train.series_length != test.series_length:
        raise ParseError("train and test series lengths differ")
    return train, test


def write_ucr(data: LabeledDataset, path, delimiter: str = ",") -> None:
    lines = []
    for row, lab in zip(data.X, data.y):
        vals = delimiter.join(f"{v:.17g}" for v in row)
        lines.append(f"{data.classes[lab]}{delimiter}{vals}")
    Path(path).write_text("\n".join(lines) + "\n")


def stratified_resample(train: LabeledDataset, test: LabeledDataset, seed: int):
    """Redraw a train/test split keeping the original per-class sizes.

    Seed 0 returns the original split untouched.
    """
    if seed == 0:
        return train, test
    if train.classes != test.classes:
        raise ValueError("train and test use different label mappings")
    X = np.vstack([train.X, test.X])
    y = np.concatenate([train.y, test.y])
    rng = np.random.default_rng(seed)
    tr_idx, te_idx = [], []
    for c in range(train.n_classes):
        pool = np.flatnonzero(y == c)
        n_tr = int(np.sum(train.y == c))
        if pool.size == 0:
            raise ValueError(f"class {train.classes[c]!r} absent from the pool")
        pool = rng.permutation(pool)
        tr_idx.append(pool[:n_tr])
        te_idx.append(pool[n_tr:])
    tr = np.sort(np.concatenate(tr_idx))
    te = np.sort(np.concatenate(te_idx))
    mk = lambda idx: LabeledDataset(X[idx], y[idx], train.name, train.classes)
    return mk(tr), mk(te)


SHAPELET_LENGTH = 29


def _sine_shape(length: int) -> np.ndarray:
    t = np.arange(length) / length
    return np.sin(2 * np.pi * t)


def _head_shoulders_shape(length: int) -> np.ndarray:
    # three half-sine lobes, the middle one twice as tall as the shoulders;
    # "truncated" means the lobes are cut from one period, not smoothly joined
    third = length // 3
    sizes = [third, length - 2 * third, third]
    heights = [0.5, 1.0, 0.5]
    parts = [h * np.sin(np.pi * (np.arange(s) + 0.5) / s) for s, h in zip(sizes, heights)]
    return np.concatenate(parts)


def _place(rng, m: int, k: int, length: int) -> np.ndarray:
    # uniform over non-overlapping placements: choose k sorted points in the
    # free space, then shift the i-th start by i shapelet lengths. A one-point
    # gap keeps neighbours apart as separate segments when there is room.
    free = m - k * length
    if free < 0:
        raise ValueError(f"cannot fit {k} shapelets of length {length} into {m} points")
    gap = 1 if free >= k - 1 else 0
    free -= gap * max(k - 1, 0)
    starts = np.sort(rng.integers(0, free + 1, size=k))
    return starts + np.arange(k) * (length + gap)


def generate_dictionary_data(
    n_per_class: int,
    m: int,
    counts=(5, 1),
    noise_std: float = 1.0,
    seed: int = 0,
    amplitude: float = 2.0,
    shapelet_length: int = SHAPELET_LENGTH,
) -> LabeledDataset:
    """Two-class data where the classes differ in *how often* a pattern recurs.

    Every series is white noise of std ``noise_std``. Class 0 series embed
    ``counts[0]`` shapelets and class 1 series ``counts[1]``; each shapelet
    is a one-period sine or a head-and-shoulders shape (picked uniformly),
    scaled by ``amplitude`` and put at a random non-overlapping offset.

    Placements are recorded in ``meta["placements"]`` as one list of
    ``(start, kind)`` pairs per series.
    """
    k1, k2 = counts
    if k1 == k2:
        raise ValueError("class shapelet counts must differ")
    if max(k1, k2) * shapelet_length > m:
        raise ValueError("infeasible packing: shapelets do not fit in the series")
    rng = np.random.default_rng(seed)
    shapes = (_sine_shape(shapelet_length), _head_shoulders_shape(shapelet_length))
    X = np.empty((2 * n_per_class, m))
    y = np.repeat([0, 1], n_per_class)
    placements = []
    for i, label in enumerate(y):
        x = rng.normal(0.0, noise_std, size=m) if noise_std > 0 else np.zeros(m)
        k = (k1, k2)[label]
        kinds = rng.integers(0, 2, size=k)
        starts = _place(rng, m, k, shapelet_length)
        for s, kind in zip(starts, kinds):
            x[s : s + shapelet_length] += amplitude * shapes[kind]
        X[i] = x
        placements.append([(int(s), ("sine", "head_shoulders")[kind]) for s, kind in zip(starts, kinds)])
    meta = dict(
        n_per_class=n_per_class,
        m=m,
        counts=[int(k1), int(k2)],
        noise_std=noise_std,
        seed=seed,
        amplitude=amplitude,
        shapelet_length=shapelet_length,
        placements=placements,
    )
    return LabeledDataset(X, y, name="dictionary", classes=("0", "1"), meta=meta)


def write_generated(data: LabeledDataset, path) -> None:
    """UCR file plus a ``.json`` sidecar holding the generator parameters."""
    path = Path(path)
    write_ucr(data, path)
    side = {k: v for k, v in data.meta.items() if k != "placements"}
    path.with_suffix(path.suffix + ".json").write_text(json.dumps(side, indent=2) + "\n")
