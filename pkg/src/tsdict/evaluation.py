"""Accuracy aggregation and rank-based comparison of classifiers.

Rank 1 is the most accurate classifier. Pairwise differences use
Wilcoxon signed-rank tests; cliques come from Holm's step-down procedure.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.stats import chi2, norm, rankdata

__all__ = [
    "ResultTable",
    "RankReport",
    "mean_accuracy",
    "average_ranks",
    "friedman_statistic",
    "friedman_test",
    "wilcoxon_signed_rank",
    "holm_reject",
    "holm_cliques",
    "rank_report",
    "read_results",
    "write_results",
    "RESULT_FIELDS",
]

RESULT_FIELDS = ("classifier", "dataset", "resample", "accuracy", "train_time_s", "params")


@dataclass
class ResultTable:
    """Accuracies keyed by ``(classifier, dataset)`` then resample index."""

    cells: dict = field(default_factory=lambda: defaultdict(dict))

    def add(self, classifier: str, dataset: str, resample: int, accuracy: float) -> None:
        if not 0.0 <= accuracy <= 1.0:
            raise ValueError(f"accuracy {accuracy} outside [0, 1]")
        self.cells[(classifier, dataset)][int(resample)] = float(accuracy)

    @property
    def classifiers(self) -> list[str]:
        return sorted({c for c, _ in self.cells})

    @property
    def datasets(self) -> list[str]:
        return sorted({d for _, d in self.cells})

    def missing(self) -> list[tuple]:
        return [
            (c, d)
            for c, d in itertools.product(self.classifiers, self.datasets)
            if not self.cells.get((c, d))
        ]

    def means(self) -> np.ndarray:
        """``(n_classifiers, n_datasets)`` mean accuracies; raises on holes."""
        holes = self.missing()
        if holes:
            names = ", ".join(f"{c}/{d}" for c, d in holes)
            raise ValueError(f"missing result cells: {names}")
        return np.array(
            [[mean_accuracy(self, c, d, warn=False)[0] for d in self.datasets] for c in self.classifiers]
        )


def mean_accuracy(table: ResultTable, classifier: str, dataset: str, warn: bool = True):
    """Mean and standard error over resamples; one resample gives stderr 0 with a warning."""
    vals = np.array(list(table.cells.get((classifier, dataset), {}).values()))
    if vals.size == 0:
        raise ValueError(f"no results for {classifier} on {dataset}")
    if vals.size == 1:
        if warn:
            warnings.warn(f"{classifier}/{dataset}: single resample, standard error set to 0", stacklevel=2)
        return float(vals[0]), 0.0
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(vals.size))


def average_ranks(means) -> np.ndarray:
    """Mean rank per classifier (rows) over datasets (columns), mid-ranks for ties."""
    A = np.asarray(means, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] < 2 or A.shape[1] < 1:
        raise ValueError("need at least 2 classifiers and 1 dataset")
    ranks = rankdata(-A, axis=0)
    return ranks.mean(axis=1)


def friedman_statistic(avg_ranks, n_datasets: int) -> float:
    R = np.asarray(avg_ranks, dtype=np.float64)
    k = R.size
    return float(12.0 * n_datasets / (k * (k + 1)) * (np.sum(R**2) - k * (k + 1) ** 2 / 4.0))


def friedman_test(means) -> tuple[float, float]:
    """Friedman chi-square statistic and p-value for a classifier x dataset table."""
    A = np.asarray(means, dtype=np.float64)
    k, n = A.shape
    if k < 2 or n < 2:
        raise ValueError("Friedman test needs at least 2 classifiers and 2 datasets")
    stat = max(friedman_statistic(average_ranks(A), n), 0.0)
    return stat, float(chi2.sf(stat, k - 1))


def wilcoxon_signed_rank(a, b) -> float:
    """Two-sided p-value of the signed-rank test (normal approximation).

    Zero differences are dropped; tie and continuity corrections applied.
    """
    d = np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)
    d = d[d != 0]
    n = d.size
    if n == 0:
        warnings.warn("all paired differences are zero, returning p = 1", stacklevel=2)
        return 1.0
    if n < 5:
        warnings.warn(f"only {n} non-zero differences; the normal approximation is rough", stacklevel=2)
    r = rankdata(np.abs(d))
    w_plus = r[d > 0].sum()
    mean = n * (n + 1) / 4.0
    _, counts = np.unique(r, return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24.0 - np.sum(counts**3 - counts) / 48.0
    if var <= 0:
        return 1.0
    z = max(abs(w_plus - mean) - 0.5, 0.0) / np.sqrt(var)
    return float(min(1.0, 2.0 * norm.sf(z)))


def holm_reject(pvalues, alpha: float = 0.05) -> np.ndarray:
    """Holm step-down: reject ``p_(i) <= alpha / (k - i + 1)`` until the first failure."""
    p = np.asarray(pvalues, dtype=np.float64)
    k = p.size
    reject = np.zeros(k, dtype=bool)
    for i, idx in enumerate(np.argsort(p, kind="stable")):
        if p[idx] > alpha / (k - i):
            break
        reject[idx] = True
    return reject


def holm_cliques(avg_ranks, pairwise_p, alpha: float = 0.05, names=None) -> list[list]:
    """Maximal runs of rank-ordered classifiers with no Holm-rejected pair inside.

    Runs contained in a longer run are dropped; a classifier different from
    all its neighbours forms its own clique.
    """
    R = np.asarray(avg_ranks, dtype=np.float64)
    P = np.asarray(pairwise_p, dtype=np.float64)
    k = R.size
    names = list(names) if names is not None else list(range(k))
    pairs = list(itertools.combinations(range(k), 2))
    rejected = np.zeros((k, k), dtype=bool)
    if pairs:
        flags = holm_reject([P[i, j] for i, j in pairs], alpha)
        for (i, j), f in zip(pairs, flags):
            rejected[i, j] = rejected[j, i] = f
    order = np.argsort(R, kind="stable")
    cliques, last_end = [], -1
    for start in range(k):
        end = start
        while end + 1 < k and not any(rejected[order[end + 1], order[t]] for t in range(start, end + 1)):
            end += 1
        if end > last_end:
            cliques.append([names[order[t]] for t in range(start, end + 1)])
            last_end = end
    return cliques


@dataclass
class RankReport:
    classifiers: list
    datasets: list
    avg_ranks: np.ndarray
    friedman_stat: float
    friedman_p: float
    pairwise_p: np.ndarray
    cliques: list
    alpha: float

    def ranks_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["classifier", "avg_rank"])
        for i in np.argsort(self.avg_ranks, kind="stable"):
            w.writerow([self.classifiers[i], f"{self.avg_ranks[i]:.6f}"])
        return out.getvalue()

    def pairwise_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow([""] + list(self.classifiers))
        for name, row in zip(self.classifiers, self.pairwise_p):
            w.writerow([name] + [f"{v:.6g}" for v in row])
        return out.getvalue()

    def friedman_text(self) -> str:
        return json.dumps(
            dict(statistic=self.friedman_stat, p_value=self.friedman_p,
                 n_classifiers=len(self.classifiers), n_datasets=len(self.datasets)),
            indent=2,
        ) + "\n"

    def cliques_text(self) -> str:
        lines = [f"average ranks over {len(self.datasets)} datasets (1 = best), Holm alpha = {self.alpha}"]
        for i in np.argsort(self.avg_ranks, kind="stable"):
            lines.append(f"  {self.avg_ranks[i]:7.3f}  {self.classifiers[i]}")
        lines.append("cliques (no significant difference within):")
        lines += ["  [" + ", ".join(map(str, c)) + "]" for c in self.cliques]
        return "\n".join(lines) + "\n"


def rank_report(table: ResultTable, alpha: float = 0.05) -> RankReport:
    A = table.means()
    names, datasets = table.classifiers, table.datasets
    R = average_ranks(A)
    if A.shape[1] >= 2:
        stat, p = friedman_test(A)
    else:
        stat, p = float("nan"), float("nan")
    k = len(names)
    P = np.ones((k, k))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for i, j in itertools.combinations(range(k), 2):
            P[i, j] = P[j, i] = wilcoxon_signed_rank(A[i], A[j])
    return RankReport(names, datasets, R, stat, p, P, holm_cliques(R, P, alpha, names), alpha)


def read_results(path) -> ResultTable:
    """Results CSV; the header must name at least classifier, dataset, resample, accuracy."""
    table = ResultTable()
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        need = {"classifier", "dataset", "resample", "accuracy"}
        if reader.fieldnames is None or not need <= set(reader.fieldnames):
            raise ValueError(f"{path}: header must contain {sorted(need)}")
        for row in reader:
            rowno = reader.line_num
            try:
                table.add(row["classifier"], row["dataset"], int(row["resample"]), float(row["accuracy"]))
            except (TypeError, ValueError) as err:
                raise ValueError(f"{path}: malformed row {rowno}: {err}") from None
    return table


def write_results(rows, path, append: bool = True) -> None:
    path = Path(path)
    new = not path.exists() or path.stat().st_size == 0
    with open(path, "a" if append else "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=RESULT_FIELDS, lineterminator="\n")
        if new or not append:
            w.writeheader()
        for r in rows:
            w.writerow(r)
