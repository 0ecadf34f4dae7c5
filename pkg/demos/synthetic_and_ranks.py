"""
Pattern counts and classifier comparison
========================================

The generator builds two classes that differ only in how many times a short
shape recurs, which whole-series distances find hard and word counts find
easy. The second half ranks a few variants over several datasets.
"""

import warnings

import numpy as np

from tsdict.botsw import BOTSW, BotswGrid
from tsdict.classifiers import ParameterGrid, make_variant
from tsdict.data import generate_dictionary_data
from tsdict.evaluation import ResultTable, rank_report

# %%
# Data
# ----
train = generate_dictionary_data(20, 300, counts=(5, 1), noise_std=1.0, seed=0)
test = generate_dictionary_data(20, 300, counts=(5, 1), noise_std=1.0, seed=1)
print(train.X.shape, train.meta["placements"][0][:3])

# Nearest neighbour on the raw series, for reference
d = ((test.X[:, None, :] - train.X[None, :, :]) ** 2).sum(axis=-1)
print("1-NN Euclidean:", np.mean(train.y[d.argmin(axis=1)] == test.y))

# %%
# Dictionary classifiers
# ----------------------
grid = ParameterGrid(windows=tuple(range(20, 121, 20)))
for name in ("BOP", "BOP+Ens", "BOSS"):
    print(name, make_variant(name, grid).fit(train).score(test.X, test.y))
small = BotswGrid(n_b=(4,), a=(4,), k=(16, 32))
print("BOTSW", BOTSW(grid=small).fit(train).score(test.X, test.y))

# %%
# Ranks and cliques
# -----------------
# One row per (classifier, dataset, resample). Rank 1 is best; a clique is a
# run of classifiers in rank order with no significant pairwise difference.
table = ResultTable()
for seed in range(6):
    tr = generate_dictionary_data(10, 200, counts=(4, 1), noise_std=1.0, seed=10 + seed)
    te = generate_dictionary_data(10, 200, counts=(4, 1), noise_std=1.0, seed=20 + seed)
    for name in ("BOP", "BOP+Ens", "BOSS"):
        table.add(name, f"synthetic{seed}", 0, make_variant(name, grid).fit(tr).score(te.X, te.y))
with warnings.catch_warnings():
    # six datasets is below the Wilcoxon approximation's comfort zone
    warnings.simplefilter("ignore")
    report = rank_report(table)
print(report.ranks_csv())
print(report.friedman_text())
print(report.cliques_text())
