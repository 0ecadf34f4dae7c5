"""Slow pure-Python reference implementations used as test oracles.

Nothing here imports the package; everything is plain loops over lists.
"""

import cmath
import math
from collections import Counter
from statistics import NormalDist


def paa(x, l):
    w = len(x)
    width = w / l
    out = []
    for i in range(l):
        lo, hi = i * width, (i + 1) * width
        acc = 0.0
        for j, v in enumerate(x):
            overlap = min(j + 1, hi) - max(j, lo)
            if overlap > 0:
                acc += overlap * v
        out.append(acc / width)
    return out


def znorm(x):
    mu = sum(x) / len(x)
    sd = math.sqrt(sum((v - mu) ** 2 for v in x) / len(x))
    if sd < 1e-8:
        return [0.0] * len(x)
    return [(v - mu) / sd for v in x]


def gaussian_breakpoints(alpha):
    nd = NormalDist()
    return [nd.inv_cdf(i / alpha) for i in range(1, alpha)]


def bin_of(value, row):
    return sum(1 for b in row if b < value)


def key(symbols, alpha):
    return sum(int(s) * alpha**i for i, s in enumerate(symbols))


def sax_word(x, l, alpha):
    bps = gaussian_breakpoints(alpha)
    return [bin_of(v, bps) for v in paa(znorm(x), l)]


def dft(x, l, p):
    w = len(x)
    start = 1 if p else 0
    out = []
    for k in range(start, start + l // 2):
        q = sum(v * cmath.exp(-2j * math.pi * j * k / w) for j, v in enumerate(x))
        out += [q.real, q.imag]
    return out


def mcb_table(X, w, l, alpha, p):
    pooled = [[] for _ in range(l)]
    for x in X:
        for s in range(0, len(x) - w + 1, w):
            for i, c in enumerate(dft(x[s : s + w], l, p)):
                pooled[i].append(c)
    table = []
    for vals in pooled:
        vals = sorted(vals)
        n = len(vals)
        table.append([vals[math.ceil((j + 1) * n / alpha) - 1] for j in range(alpha - 1)])
    return table


def bag(x, w, word_fn, numerosity=True):
    counts = Counter()
    prev = None
    for s in range(len(x) - w + 1):
        word = word_fn(x[s : s + w])
        if not numerosity or word != prev:
            counts[word] += 1
        prev = word
    return dict(counts)


def euclid(a, b):
    return sum((a.get(k, 0) - b.get(k, 0)) ** 2 for k in set(a) | set(b))


def boss(test, train):
    return sum((v - train.get(k, 0)) ** 2 for k, v in test.items() if v > 0)


def hi(a, b):
    return sum(min(a.get(k, 0), b.get(k, 0)) for k in set(a) | set(b))


def nn(query, refs, dist, similarity=False):
    best, label = None, None
    for ref, lab in refs:
        d = dist(query, ref)
        d = -d if similarity else d
        if best is None or d < best:
            best, label = d, lab
    return label


def bop_predict(train_X, train_y, test_X, w, l, alpha):
    """Single-parameter BOP: SAX words, numerosity reduction, 1-NN Euclidean."""
    word = lambda win: key(sax_word(win, l, alpha), alpha)
    refs = [(bag(x, w, word), y) for x, y in zip(train_X, train_y)]
    return [nn(bag(x, w, word), refs, euclid) for x in test_X]


def boss_member_predict(train_X, train_y, test_X, w, l, alpha, p):
    table = mcb_table(train_X, w, l, alpha, p)
    word = lambda win: key([bin_of(c, row) for c, row in zip(dft(win, l, p), table)], alpha)
    refs = [(bag(x, w, word), y) for x, y in zip(train_X, train_y)]
    return [nn(bag(x, w, word), refs, boss) for x in test_X]


def loocv(bags, dist, similarity=False):
    correct = 0
    for i, (b, lab) in enumerate(bags):
        others = [r for j, r in enumerate(bags) if j != i]
        correct += nn(b, others, dist, similarity) == lab
    return correct / len(bags)


def vote(labels):
    counts = Counter(labels)
    top = max(counts.values())
    return min(c for c, v in counts.items() if v == top)
