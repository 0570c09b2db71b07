"""Undirected simple graphs and node label maps.

Nodes get dense internal ids ``0..n-1`` in order of first appearance in the
edge list; the original tokens are kept in ``Graph.node_names`` for I/O.
Adjacency is stored in CSR form (``indptr``/``indices``) so hot loops can
index it as plain arrays.
"""
from __future__ import annotations

import io
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np


class GraphFormatError(ValueError):
    """Malformed edge-list or label input."""


@dataclass(frozen=True, eq=False)
class Graph:
    node_names: tuple[str, ...]
    indptr: np.ndarray
    indices: np.ndarray
    _index: dict = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)
        if self._index is None:
            object.__setattr__(self, "_index", {name: i for i, name in enumerate(self.node_names)})

    @property
    def n_nodes(self) -> int:
        return len(self.node_names)

    @property
    def n_edges(self) -> int:
        return len(self.indices) // 2

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        check_node(self, v)
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    @property
    def adjacency(self) -> list[np.ndarray]:
        return [self.indices[self.indptr[v]:self.indptr[v + 1]] for v in range(self.n_nodes)]

    def node_id(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown node {name!r}") from None

    def edges(self) -> Iterable[tuple[int, int]]:
        """Yield each undirected edge once as ``(u, v)`` with ``u < v``."""
        for u in range(self.n_nodes):
            for v in self.indices[self.indptr[u]:self.indptr[u + 1]]:
                if u < v:
                    yield u, int(v)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.node_names == other.node_names
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    __hash__ = None

    def content_hash(self) -> str:
        import hashlib
        h = hashlib.sha256()
        h.update("\n".join(self.node_names).encode())
        h.update(np.ascontiguousarray(self.indptr, dtype=np.int64).tobytes())
        h.update(np.ascontiguousarray(self.indices, dtype=np.int64).tobytes())
        return h.hexdigest()


@dataclass(frozen=True)
class LabelMap:
    """Class sets per internal node id.

    ``classes`` lists the distinct class identifiers in canonical order
    (numeric when every identifier parses as an int, lexicographic
    otherwise); a class's position in that tuple is its class index.
    """
    labels: dict[int, frozenset[str]]
    classes: tuple[str, ...]

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @property
    def multi_label(self) -> bool:
        return any(len(c) > 1 for c in self.labels.values())

    def nodes(self) -> np.ndarray:
        return np.array(sorted(self.labels), dtype=np.int64)

    def indicator(self, nodes) -> np.ndarray:
        """Boolean ``len(nodes) x n_classes`` membership matrix."""
        col = {c: j for j, c in enumerate(self.classes)}
        out = np.zeros((len(nodes), self.n_classes), dtype=bool)
        for i, v in enumerate(nodes):
            for c in self.labels[int(v)]:
                out[i, col[c]] = True
        return out


def _sort_classes(classes: Iterable[str]) -> tuple[str, ...]:
    classes = set(classes)
    try:
        return tuple(sorted(classes, key=lambda c: (int(c), c)))
    except ValueError:
        return tuple(sorted(classes))


def check_node(g: Graph, v) -> None:
    if not (isinstance(v, (int, np.integer)) and 0 <= v < g.n_nodes):
        raise IndexError(f"invalid node id {v!r} for graph with {g.n_nodes} nodes")


def from_edges(edges: Iterable[tuple], node_names: Iterable[str] | None = None) -> Graph:
    """Build a graph from ``(u, v)`` pairs of node tokens.

    Tokens are stringified. ``node_names`` optionally pre-registers nodes
    (so isolated nodes can exist); the remaining ids follow first appearance.
    Self-loops are dropped and duplicate edges merged.
    """
    index: dict[str, int] = {}
    names: list[str] = []

    def intern(tok) -> int:
        tok = str(tok)
        i = index.get(tok)
        if i is None:
            i = index[tok] = len(names)
            names.append(tok)
        return i

    for name in node_names or ():
        intern(name)
    pairs = set()
    for a, b in edges:
        u, v = intern(a), intern(b)
        if u == v:
            continue
        pairs.add((u, v) if u < v else (v, u))
    return _from_pairs(names, pairs)


def _from_pairs(names: list[str], pairs) -> Graph:
    n = len(names)
    if pairs:
        arr = np.array(sorted(pairs), dtype=np.int64)
        src = np.concatenate([arr[:, 0], arr[:, 1]])
        dst = np.concatenate([arr[:, 1], arr[:, 0]])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
    else:
        src = dst = np.zeros(0, dtype=np.int64)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return Graph(tuple(names), indptr, dst.astype(np.int64))


def _content_lines(source: TextIO):
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line.split()


def load_edge_list(source: TextIO | str) -> Graph:
    """Parse a whitespace-separated edge list.

    ``source`` is a text stream or a path. Only the first two tokens of a
    line are used; anything after them (weights, timestamps) is ignored.
    """
    if isinstance(source, str):
        with open(source, encoding="utf-8") as fh:
            return load_edge_list(fh)
    edges = []
    for lineno, toks in _content_lines(source):
        if len(toks) < 2:
            raise GraphFormatError(f"line {lineno}: expected at least 2 tokens, got {len(toks)}")
        edges.append((toks[0], toks[1]))
    if not edges:
        raise GraphFormatError("empty graph")
    return from_edges(edges)


def write_edge_list(g: Graph, sink: TextIO) -> None:
    """Canonical edge list that reloads with the same node ids.

    Node ``v`` is introduced by its edges to lower ids, written ``u v``.
    A node with no lower neighbor is first declared by a self-loop line
    ``v v``, which the loader drops after registering the node. That also
    preserves isolated nodes.
    """
    names = g.node_names
    for v in range(g.n_nodes):
        lower = g.neighbors(v)
        lower = lower[lower < v]
        if lower.size == 0:
            sink.write(f"{names[v]} {names[v]}\n")
        for u in lower:
            sink.write(f"{names[u]} {names[v]}\n")


def dumps_edge_list(g: Graph) -> str:
    buf = io.StringIO()
    write_edge_list(g, buf)
    return buf.getvalue()


def load_labels(source: TextIO | str, g: Graph) -> LabelMap:
    if isinstance(source, str):
        with open(source, encoding="utf-8") as fh:
            return load_labels(fh, g)
    labels: dict[int, frozenset[str]] = {}
    for lineno, toks in _content_lines(source):
        if len(toks) < 2:
            raise GraphFormatError(f"line {lineno}: expected 'node class [class ...]'")
        name = toks[0]
        if name not in g._index:
            raise GraphFormatError(f"line {lineno}: unknown node {name!r}")
        v = g._index[name]
        if v in labels:
            raise GraphFormatError(f"line {lineno}: node {name!r} listed twice")
        labels[v] = frozenset(toks[1:])
    classes = _sort_classes(c for cs in labels.values() for c in cs)
    return LabelMap(labels, classes)


def degree(g: Graph, v: int) -> int:
    check_node(g, v)
    return int(g.indptr[v + 1] - g.indptr[v])


def bfs_distances(g: Graph, source: int, max_depth: int | None = None) -> np.ndarray:
    """Hop distances from ``source``; -1 marks unreachable (or beyond ``max_depth``)."""
    check_node(g, source)
    dist = np.full(g.n_nodes, -1, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    indptr, indices = g.indptr, g.indices
    while queue:
        u = queue.popleft()
        du = dist[u]
        if max_depth is not None and du >= max_depth:
            continue
        for w in indices[indptr[u]:indptr[u + 1]]:
            if dist[w] < 0:
                dist[w] = du + 1
                queue.append(w)
    return dist


def connected_components(g: Graph) -> int:
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components as cc

    n = g.n_nodes
    adj = csr_matrix((np.ones(len(g.indices)), g.indices, g.indptr), shape=(n, n))
    return int(cc(adj, directed=False)[0])


def diameter(g: Graph) -> int:
    """Largest finite shortest-path distance over all node pairs (0 for edgeless graphs)."""
    best = 0
    for v in range(g.n_nodes):
        best = max(best, int(bfs_distances(g, v).max()))
    return best
