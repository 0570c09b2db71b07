"""struc2vec-style structural walks.

Structural signature of node ``u`` at scale ``k``: the sorted degrees of the
nodes exactly ``k`` hops away (its *degree ring*). Two nodes are compared
layer by layer with dynamic time warping under the ratio cost
``max(x, y) / min(x, y) - 1`` and the per-layer costs accumulate:

    f_k(u, v) = f_{k-1}(u, v) + dtw(ring_k(u), ring_k(v)),    f_{-1} = 0

``f_k`` is undefined once either node runs out of nodes at some hop
``j <= k``. Layer ``k`` of the multilayer graph joins every pair with a
defined ``f_k`` using weight ``exp(-f_k)``. Each node also links to its own
copy one layer up and one layer down: the down weight is 1, and the up
weight is ``ln(Gamma + e)``, where ``Gamma`` counts the node's layer edges
that weigh strictly more than that layer's mean edge weight.

All pairs are computed exactly. That costs
``O(n^2 * k_max * L^2)`` time for rings of typical size ``L``, and
``O(k_max * n^2)`` memory for the distance and transition tables. Use it
for graphs of a few thousand nodes at most. Pairs whose rings are identical
share one DTW evaluation, which helps a lot on the low layers of
hub-and-spoke graphs.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .graph import Graph, bfs_distances, check_node, diameter
from .walkgen import Walk, WalkGenerator

CACHE_VERSION = 1


@dataclass(frozen=True, eq=False)
class DegreeRingSequence:
    node: int
    k: int
    degrees: np.ndarray

    def __len__(self):
        return len(self.degrees)


def degree_ring(g: Graph, v: int, k: int) -> DegreeRingSequence:
    check_node(g, v)
    if k < 0:
        raise ValueError(f"hop count must be >= 0, got {k}")
    dist = bfs_distances(g, v, max_depth=k)
    degs = np.sort(g.degrees[dist == k])
    return DegreeRingSequence(int(v), int(k), degs)


@numba.njit(cache=True, nogil=True)
def _ratio_cost(x, y):
    # degree 0 only occurs in the k=0 ring of an isolated node; treat as 1
    if x < 1.0:
        x = 1.0
    if y < 1.0:
        y = 1.0
    return x / y - 1.0 if x >= y else y / x - 1.0


_OFF = 3  # padding in front of column 0 of the DP buffers


@numba.njit(cache=True, nogil=True, inline="always")
def _min3(x, y, z):
    # written as compare-selects so LLVM emits minsd rather than branches
    m = x if x < y else y
    return m if m < z else z


@numba.njit(cache=True, nogil=True)
def _cost_row(x, b, out):
    # out[j + _OFF] = cost(x, b[j - 1]) for j in 1..m, +inf everywhere else
    out[:] = np.inf
    for j in range(len(b)):
        out[j + 1 + _OFF] = _ratio_cost(x, b[j])


@numba.njit(cache=True, nogil=True)
def _dtw(a, b):
    # Full DP over (len(a)+1) x (len(b)+1) with the usual virtual row/column.
    # Rows go four at a time on a skewed wavefront: at step t, lane L fills
    # column t - L of row i + L. The four running minima stay in registers,
    # so their dependency chains overlap instead of serialising. Costs are
    # +inf outside 1..m, which keeps the ragged wavefront edges at +inf.
    n = len(a)
    m = len(b)
    width = m + _OFF + 4
    inf = np.inf
    # one cost row per distinct value of a (a is sorted in practice, so the
    # runs are contiguous; unsorted input still works, just with more rows)
    which = np.empty(n, dtype=np.int64)
    n_rows = 0
    for i in range(n):
        if i == 0 or a[i] != a[i - 1]:
            n_rows += 1
        which[i] = n_rows - 1
    costs = np.empty((n_rows, width))
    for i in range(n):
        if i == 0 or a[i] != a[i - 1]:
            _cost_row(a[i], b, costs[which[i]])
    up = np.full(width, inf)
    up[_OFF] = 0.0
    row = np.full(width, inf)
    i = 0
    while i + 4 <= n:
        c0 = costs[which[i]]
        c1 = costs[which[i + 1]]
        c2 = costs[which[i + 2]]
        c3 = costs[which[i + 3]]
        l0 = l1 = l2 = l3 = inf
        ll0 = ll1 = ll2 = inf
        for t in range(1, m + 4):
            k = t + _OFF
            v3 = c3[k - 3] + _min3(ll2, l2, l3)
            row[k - 3] = v3
            l3 = v3
            v2 = c2[k - 2] + _min3(ll1, l1, l2)
            ll2 = l2
            l2 = v2
            v1 = c1[k - 1] + _min3(ll0, l0, l1)
            ll1 = l1
            l1 = v1
            v0 = c0[k] + _min3(up[k - 1], up[k], l0)
            ll0 = l0
            l0 = v0
        up, row = row, up
        i += 4
    while i < n:
        c0 = costs[which[i]]
        left = inf
        for j in range(1, m + 1):
            k = j + _OFF
            left = c0[k] + _min3(up[k - 1], up[k], left)
            row[k] = left
        row[_OFF] = inf
        up, row = row, up
        i += 1
    return up[m + _OFF]


def dtw_distance(a, b) -> float:
    """Unconstrained DTW between two degree sequences under ``max/min - 1``."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise ValueError("undefined DTW: empty sequence")
    return float(_dtw(a, b))


def structural_distance(g: Graph, u: int, v: int, k: int) -> float | None:
    """Cumulative structural distance ``f_k(u, v)``; ``None`` when undefined."""
    total = 0.0
    for j in range(k + 1):
        ru, rv = degree_ring(g, u, j).degrees, degree_ring(g, v, j).degrees
        if ru.size == 0 or rv.size == 0:
            return None
        total += dtw_distance(ru, rv)
    return total


# -- all-pairs construction --------------------------------------------------

def _ring_table(g: Graph, k_max: int) -> list[list[np.ndarray]]:
    """``rings[k][v]`` = sorted degree ring of ``v`` at hop ``k``."""
    n = g.n_nodes
    adj = csr_matrix((np.ones(len(g.indices)), g.indices, g.indptr), shape=(n, n))
    hops = shortest_path(adj, directed=False, unweighted=True)
    degs = g.degrees.astype(np.float64)
    rings = []
    for k in range(k_max + 1):
        rings.append([np.sort(degs[hops[v] == k]) for v in range(n)])
    return rings


@numba.njit(cache=True, nogil=True, parallel=True)
def _pairwise_dtw(values, offsets):
    m = len(offsets) - 1
    out = np.zeros((m, m), dtype=np.float64)
    for i in numba.prange(m):
        a = values[offsets[i]:offsets[i + 1]]
        for j in range(i + 1, m):
            d = _dtw(a, values[offsets[j]:offsets[j + 1]])
            out[i, j] = d
            out[j, i] = d
    return out


def _layer_dtw(rings: list[np.ndarray]) -> np.ndarray:
    """``n x n`` DTW between rings; NaN where either ring is empty."""
    n = len(rings)
    uniq: dict[bytes, int] = {}
    reps = []
    slot = np.full(n, -1, dtype=np.int64)
    for v, r in enumerate(rings):
        if r.size == 0:
            continue
        key = r.tobytes()
        if key not in uniq:
            uniq[key] = len(reps)
            reps.append(r)
        slot[v] = uniq[key]
    out = np.full((n, n), np.nan)
    if not reps:
        return out
    offsets = np.zeros(len(reps) + 1, dtype=np.int64)
    np.cumsum([len(r) for r in reps], out=offsets[1:])
    small = _pairwise_dtw(np.concatenate(reps), offsets)
    have = np.flatnonzero(slot >= 0)
    out[np.ix_(have, have)] = small[np.ix_(slot[have], slot[have])]
    return out


@dataclass(eq=False)
class MultilayerGraph:
    """Layered structural-similarity graph over the nodes of ``g``.

    ``distances[k]`` holds ``f_k`` (NaN where undefined, 0 on the
    diagonal). ``up_weights[v, k]``/``down_weights[v, k]`` weigh the move
    from layer ``k`` to ``k+1``/``k-1``; impossible moves carry weight 0.
    """
    k_max: int
    distances: np.ndarray
    up_weights: np.ndarray
    down_weights: np.ndarray
    _cumulative: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_nodes(self) -> int:
        return self.distances.shape[1]

    def layer_weights(self, k: int) -> np.ndarray:
        """Within-layer weights ``exp(-f_k)``; 0 for undefined pairs and self-pairs."""
        f = self.distances[k]
        w = np.where(np.isnan(f), 0.0, np.exp(-np.nan_to_num(f, nan=0.0)))
        np.fill_diagonal(w, 0.0)
        return w

    def transition_probabilities(self, u: int, k: int) -> np.ndarray:
        row = self.layer_weights(k)[u]
        total = row.sum()
        return row / total if total > 0 else row

    @property
    def cumulative(self) -> np.ndarray:
        if self._cumulative is None:
            self._cumulative = np.stack([np.cumsum(self.layer_weights(k), axis=1)
                                         for k in range(self.k_max + 1)])
        return self._cumulative

    def save(self, path, graph_hash: str) -> None:
        np.savez(path, version=CACHE_VERSION, graph_hash=graph_hash, k_max=self.k_max,
                 distances=self.distances, up_weights=self.up_weights,
                 down_weights=self.down_weights)

    @classmethod
    def load(cls, path, graph_hash: str | None = None) -> "MultilayerGraph":
        with np.load(path) as z:
            if int(z["version"]) != CACHE_VERSION:
                raise ValueError(f"unsupported multilayer cache version {int(z['version'])}")
            if graph_hash is not None and str(z["graph_hash"]) != graph_hash:
                raise ValueError("multilayer cache was built for a different graph")
            return cls(int(z["k_max"]), z["distances"], z["up_weights"], z["down_weights"])


def default_k_max(g: Graph) -> int:
    return min(diameter(g), 5)


def _up_weights(w: np.ndarray) -> np.ndarray:
    n = w.shape[0]
    iu = np.triu_indices(n, 1)
    edges = w[iu]
    edges = edges[edges > 0]
    if edges.size == 0:
        return np.full(n, 1.0)
    mean = edges.mean()
    gamma = (w > mean).sum(axis=1)
    return np.log(gamma + math.e)


def build_multilayer(g: Graph, k_max: int | None = None) -> MultilayerGraph:
    if k_max is None:
        k_max = default_k_max(g)
    if k_max < 0:
        raise ValueError(f"k_max must be >= 0, got {k_max}")
    n = g.n_nodes
    rings = _ring_table(g, k_max)
    distances = np.empty((k_max + 1, n, n))
    up = np.zeros((n, k_max + 1))
    down = np.ones((n, k_max + 1))
    down[:, 0] = 0.0
    f = np.zeros((n, n))
    for k in range(k_max + 1):
        f = f + _layer_dtw(rings[k])
        distances[k] = f
    ml = MultilayerGraph(k_max, distances, up, down)
    for k in range(k_max):
        up[:, k] = _up_weights(ml.layer_weights(k))
    return ml


def build_multilayer_cached(g: Graph, k_max: int | None, cache_dir) -> MultilayerGraph:
    """Build, or load from ``cache_dir`` if a cache for (graph, k_max) exists."""
    import os

    if k_max is None:
        k_max = default_k_max(g)
    h = g.content_hash()
    path = os.path.join(cache_dir, f"multilayer-{h[:16]}-k{k_max}.npz")
    if os.path.exists(path):
        return MultilayerGraph.load(path, h)
    ml = build_multilayer(g, k_max)
    os.makedirs(cache_dir, exist_ok=True)
    buf = io.BytesIO()
    ml.save(buf, h)
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(buf.getvalue())
    os.replace(tmp, path)
    return ml


# -- walks -------------------------------------------------------------------

@numba.njit(cache=True)
def _structural_walk_kernel(cum, up, down, start, length, stay_prob, rng):
    k_top = cum.shape[0] - 1
    n = cum.shape[1]
    out = np.empty(length, dtype=np.int64)
    out[0] = start
    produced = 1
    cur = start
    layer = 0
    while produced < length:
        if rng.random() < stay_prob:
            row = cum[layer, cur]
            total = row[n - 1]
            if total <= 0.0:
                if layer == 0:
                    break
                layer -= 1
                continue
            r = rng.random() * total
            nxt = np.searchsorted(row, r, side="right")
            if nxt >= n:
                nxt = np.searchsorted(row, total, side="left")
            cur = nxt
            out[produced] = cur
            produced += 1
        elif k_top > 0:
            if layer == 0:
                layer = 1
            elif layer == k_top:
                layer -= 1
            else:
                u = up[cur, layer]
                if rng.random() * (u + down[cur, layer]) < u:
                    layer += 1
                else:
                    layer -= 1
    return out[:produced]


def structural_walk(ml: MultilayerGraph, g: Graph, start: int, length: int, stay_prob: float,
                    rng: np.random.Generator, tag: str = "struc2vec") -> Walk:
    """Walk over the multilayer graph, recording only within-layer moves.

    Starts at ``(start, layer 0)``. Each step stays in the layer with
    probability ``stay_prob`` (jumping to a neighbor in proportion to
    layer weight) or otherwise changes layer without emitting a node. A node
    without neighbors in its layer drops one layer; with no neighbors even
    at layer 0 the walk ends early.
    """
    check_node(g, start)
    if length < 1:
        raise ValueError(f"walk length must be >= 1, got {length}")
    if not 0.0 < stay_prob < 1.0:
        raise ValueError(f"stay_prob must lie in (0, 1), got {stay_prob}")
    nodes = _structural_walk_kernel(ml.cumulative, ml.up_weights, ml.down_weights,
                                    int(start), int(length), float(stay_prob), rng)
    return Walk(nodes, tag)


class StructuralWalker(WalkGenerator):
    tag = "struc2vec"

    def __init__(self, ml: MultilayerGraph, length: int = 80, stay_prob: float = 0.7):
        super().__init__(length)
        self.ml = ml
        self.stay_prob = stay_prob

    @classmethod
    def from_graph(cls, g: Graph, k_max: int | None = None, length: int = 80,
                   stay_prob: float = 0.7, cache_dir=None) -> "StructuralWalker":
        if cache_dir is not None:
            ml = build_multilayer_cached(g, k_max, cache_dir)
        else:
            ml = build_multilayer(g, k_max)
        return cls(ml, length, stay_prob)

    def generate(self, g, start, length, rng):
        return structural_walk(self.ml, g, start, length, self.stay_prob, rng, tag=self.tag)
