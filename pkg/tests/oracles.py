"""Slow, obviously-correct reference implementations used as test oracles."""
from fractions import Fraction
from functools import lru_cache

import numpy as np


def ratio_cost(x, y):
    x, y = max(x, 1), max(y, 1)
    return Fraction(max(x, y), min(x, y)) - 1


def dtw_oracle(a, b):
    """Exact DTW by memoised recursion over the classic three-way recurrence."""
    a, b = tuple(int(x) for x in a), tuple(int(x) for x in b)

    @lru_cache(maxsize=None)
    def D(i, j):
        c = ratio_cost(a[i], b[j])
        if i == 0 and j == 0:
            return c
        best = None
        for pi, pj in ((i - 1, j), (i, j - 1), (i - 1, j - 1)):
            if pi >= 0 and pj >= 0:
                v = D(pi, pj)
                best = v if best is None or v < best else best
        return c + best

    return D(len(a) - 1, len(b) - 1)


def dtw_paths(a, b):
    """Enumerate every monotone alignment path explicitly; returns the min cost."""
    n, m = len(a), len(b)
    best = [None]

    def walk(i, j, acc):
        acc = acc + ratio_cost(a[i], b[j])
        if (i, j) == (n - 1, m - 1):
            if best[0] is None or acc < best[0]:
                best[0] = acc
            return
        for di, dj in ((1, 0), (0, 1), (1, 1)):
            if i + di < n and j + dj < m:
                walk(i + di, j + dj, acc)

    walk(0, 0, Fraction(0))
    return best[0]


def bfs_rings(adj, v):
    """Hop distance from ``v`` for a dict-of-sets adjacency."""
    dist = {v: 0}
    frontier = [v]
    while frontier:
        nxt = []
        for u in frontier:
            for w in adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    nxt.append(w)
        frontier = nxt
    return dist


def central_difference(f, x, h=1e-5):
    """Numerical gradient of scalar ``f`` at array ``x`` (not modified)."""
    x = np.array(x, dtype=np.float64)
    g = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        i = it.multi_index
        old = x[i]
        x[i] = old + h
        fp = f(x)
        x[i] = old - h
        fm = f(x)
        x[i] = old
        g[i] = (fp - fm) / (2 * h)
    return g


def rel_error(a, b):
    a, b = np.ravel(a), np.ravel(b)
    scale = max(np.linalg.norm(a), np.linalg.norm(b), 1e-12)
    return float(np.linalg.norm(a - b) / scale)


def f1_by_hand(pred, truth):
    """Macro-F1 from explicit per-class confusion counts, classes taken from ``truth``."""
    scores = []
    for c in sorted(set(truth)):
        tp = sum(p == c and t == c for p, t in zip(pred, truth))
        fp = sum(p == c and t != c for p, t in zip(pred, truth))
        fn = sum(p != c and t == c for p, t in zip(pred, truth))
        prec = Fraction(tp, tp + fp) if tp + fp else Fraction(0)
        rec = Fraction(tp, tp + fn) if tp + fn else Fraction(0)
        scores.append(2 * prec * rec / (prec + rec) if prec + rec else Fraction(0))
    return sum(scores) / len(scores)
