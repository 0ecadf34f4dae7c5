"""Save and load fitted ensembles as a directory of text files.

Layout::

    manifest.json          model kind, classes, measure, per-member params
    member_000.bags        training bags (bag text format)
    member_000.breakpoints breakpoint table (word models)
    member_000.codebook    k-means centroids (BOTSW)
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .bagging import Approx, BagConfig, Disc, KeyedRows, format_bags, parse_bags
from .botsw import BOTSW, BotswParams, BotswTransform, Codebook
from .classifiers import DictionaryClassifier, EnsembleMember, WordTransform
from .pyramid import PyramidTransform, SpatialPyramidBOSS
from .symbolic import BreakpointTable

__all__ = ["save_model", "load_model", "FittedModel"]

FORMAT_VERSION = 1


class FittedModel:
    """A reloaded ensemble; predicts exactly like the model that was saved."""

    def __init__(self, members, n_classes: int, classes=(), kind: str = "", meta: dict | None = None):
        self.members_ = members
        self.n_classes_ = n_classes
        self.classes = tuple(classes)
        self.kind = kind
        self.meta = meta or {}

    def predict(self, X) -> np.ndarray:
        from .classifiers import ensemble_predict

        return ensemble_predict(X, self.members_, self.n_classes_)

    def score(self, X, y) -> float:
        return float(np.mean(self.predict(X) == np.asarray(y)))


def _kind(model) -> str:
    if isinstance(model, SpatialPyramidBOSS):
        return "pyramid"
    if isinstance(model, BOTSW):
        return "botsw"
    if isinstance(model, (DictionaryClassifier, FittedModel)):
        return getattr(model, "kind", "") or "dictionary"
    raise TypeError(f"cannot save {type(model).__name__}")


def _member_entry(i: int, mb: EnsembleMember, out: Path) -> dict:
    stem = f"member_{i:03d}"
    (out / f"{stem}.bags").write_text(format_bags(mb.bags()))
    entry = dict(train_acc=mb.train_acc, measure=mb.measure.value, bags=f"{stem}.bags")
    tr = mb.transform
    if isinstance(tr, BotswTransform):
        (out / f"{stem}.codebook").write_text(tr.codebook.to_text())
        entry.update(type="botsw", params=tr.params, codebook=f"{stem}.codebook")
        return entry
    word = tr.word if isinstance(tr, PyramidTransform) else tr
    (out / f"{stem}.breakpoints").write_text(word.own_table.to_text())
    entry.update(type="word", params=word.params, breakpoints=f"{stem}.breakpoints")
    if isinstance(tr, PyramidTransform):
        entry.update(type="pyramid", L=tr.L, m=tr.m, normalize=tr.normalize)
    return entry


def save_model(model, directory, classes=(), meta: dict | None = None) -> Path:
    """Write a fitted model to ``directory`` (created if needed)."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    members = getattr(model, "members_", None)
    if members is None:
        raise ValueError("model is not fitted")
    manifest = dict(
        format=FORMAT_VERSION,
        kind=_kind(model),
        n_classes=int(model.n_classes_),
        classes=list(classes),
        meta=meta or {},
        members=[_member_entry(i, mb, out) for i, mb in enumerate(members)],
    )
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return out


def _rows_from_bags(bags) -> tuple[KeyedRows, np.ndarray]:
    rows, keys, vals = [], [], []
    for i, (bag, _) in enumerate(bags):
        for k, v in bag.items():
            rows.append(i)
            keys.append(k)
            vals.append(v)
    labels = np.array([lab for _, lab in bags], dtype=np.int64)
    return KeyedRows.from_occurrences(len(bags), rows, np.array(keys, dtype=np.uint64), vals), labels


def _load_transform(entry: dict, base: Path):
    p = entry["params"]
    if entry["type"] == "botsw":
        codebook = Codebook.from_text((base / entry["codebook"]).read_text())
        return BotswTransform(codebook, BotswParams(p["n_b"], p["a"], p["r"], tuple(p["scales"])))
    cfg = BagConfig(
        w=p["w"], l=p["l"], alpha=p["alpha"], p=p["p"],
        approx=Approx(p["approx"]), disc=Disc(p["disc"]), numerosity=p.get("numerosity", True),
    )
    table = BreakpointTable.from_text((base / entry["breakpoints"]).read_text())
    word = WordTransform(cfg, table)
    if entry["type"] == "pyramid":
        return PyramidTransform(word, entry["L"], entry["m"], entry["normalize"])
    return word


def load_model(directory) -> FittedModel:
    base = Path(directory)
    path = base / "manifest.json"
    if not path.exists():
        raise FileNotFoundError(f"{path}: no saved model here")
    manifest = json.loads(path.read_text())
    if manifest.get("format") != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported model format {manifest.get('format')!r}")
    members = []
    for entry in manifest["members"]:
        rows, labels = _rows_from_bags(parse_bags((base / entry["bags"]).read_text()))
        members.append(
            EnsembleMember(_load_transform(entry, base), rows, labels, entry["measure"], entry["train_acc"])
        )
    return FittedModel(members, manifest["n_classes"], manifest["classes"], manifest["kind"], manifest["meta"])
