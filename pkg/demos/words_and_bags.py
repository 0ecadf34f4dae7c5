"""
From a series to a bag of words
===============================

Two routes turn sliding windows into words. The SAX route z-normalises a
window, averages it down to ``l`` chunks and reads each chunk against fixed
Gaussian breakpoints. The SFA route keeps a few Fourier coefficients and
bins each one with breakpoints learnt from the training data.
"""

import numpy as np

from tsdict.bagging import Approx, BagConfig, Disc, bag_dataset, bag_series
from tsdict.data import LabeledDataset
from tsdict.distances import boss_distance, euclidean_sq, histogram_intersection
from tsdict.symbolic import gaussian_breakpoints, sax_word

# %%
# A SAX word
# ----------
# With four symbols the breakpoints are the normal quartiles. A rising window
# gives a low symbol followed by a high one.
print(gaussian_breakpoints(4))
print(sax_word(np.array([1.0, 2.0, 3.0, 4.0]), l=2, alpha=4))

# %%
# Bags and numerosity reduction
# -----------------------------
# Words are stored as integer keys, ``sum(s_i * alpha**i)``. Runs of the same
# word from consecutive windows count once unless numerosity is turned off.
x = np.array([1, 2, 3, 4, 4, 3, 2, 1, 1, 2], dtype=float)
sax = BagConfig(w=4, l=2, alpha=4, p=False, approx=Approx.PAA, disc=Disc.GAUSSIAN)
print(dict(bag_series(x, sax)))
print(dict(bag_series(x, BagConfig(4, 2, 4, False, Approx.PAA, Disc.GAUSSIAN, numerosity=False))))

# %%
# Fourier words
# -------------
# The breakpoint table is fitted on disjoint training windows, one row of
# ``alpha - 1`` cut points per coefficient.
rng = np.random.default_rng(0)
t = np.arange(64)
X = np.vstack([np.sin(t / 3) + 0.3 * rng.normal(size=64), np.sign(np.sin(t / 5)) + 0.3 * rng.normal(size=64)])
sfa = BagConfig(w=16, l=4, alpha=4, p=True, approx=Approx.DFT, disc=Disc.MCB)
bags, table = bag_dataset(LabeledDataset(X, [0, 1]), sfa)
print(np.round(table.rows, 3))
for bag, label in bags:
    print(label, len(bag), "distinct words,", bag.total(), "occurrences")

# %%
# Comparing bags
# --------------
# The BOSS distance only looks at words present in the first (query) bag, so
# it is not symmetric. Histogram intersection is a similarity.
a, b = {1: 1, 2: 5}, {1: 2}
print(boss_distance(a, b), boss_distance(b, a), euclidean_sq(a, b))
print(histogram_intersection(a, b))
