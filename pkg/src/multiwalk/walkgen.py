"""Walk generators, uniform random walks and precomputed walk pools.

A walk generator is anything with a ``tag``, a default ``length`` and a
``generate(g, start, length, rng)`` method returning a :class:`Walk` that
starts at ``start``. Generators are free to emit arbitrary node sequences;
the uniform walker happens to respect adjacency.

Randomness for pooled or corpus walks is keyed per ``(node, index)`` via
:func:`multiwalk.seeding.rng_for`, so results never depend on thread count
or iteration order.
"""
from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence, TextIO

import numba
import numpy as np

from .graph import Graph, GraphFormatError, check_node
from .seeding import rng_for


@dataclass(frozen=True, eq=False)
class Walk:
    nodes: np.ndarray
    generator_tag: str = ""

    def __post_init__(self):
        if len(self.nodes) == 0:
            raise ValueError("walks must be non-empty")

    def __len__(self):
        return len(self.nodes)

    def __eq__(self, other):
        if not isinstance(other, Walk):
            return NotImplemented
        return self.generator_tag == other.generator_tag and np.array_equal(self.nodes, other.nodes)

    @property
    def start(self) -> int:
        return int(self.nodes[0])


class WalkGenerator:
    """Base for walk generators; subclasses implement :meth:`generate`."""

    tag = "generator"

    def __init__(self, length: int = 80):
        self.length = length

    def generate(self, g: Graph, start: int, length: int, rng: np.random.Generator) -> Walk:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}(tag={self.tag!r}, length={self.length})"


@numba.njit(cache=True, nogil=True)
def _uniform_walk_kernel(indptr, indices, start, uniforms):
    out = np.empty(len(uniforms) + 1, dtype=np.int64)
    out[0] = start
    cur = start
    n = 1
    for x in uniforms:
        lo = indptr[cur]
        deg = indptr[cur + 1] - lo
        if deg == 0:
            break
        j = int(x * deg)
        if j >= deg:
            j = deg - 1
        cur = indices[lo + j]
        out[n] = cur
        n += 1
    return out[:n]


def uniform_walk(g: Graph, start: int, length: int, rng: np.random.Generator,
                 tag: str = "deepwalk") -> Walk:
    """DeepWalk step rule: each successor uniform over the current node's neighbors.

    A walk that reaches a node without neighbors stops there, so walks from
    isolated nodes have length 1.
    """
    check_node(g, start)
    if length < 1:
        raise ValueError(f"walk length must be >= 1, got {length}")
    nodes = _uniform_walk_kernel(g.indptr, g.indices, int(start), rng.random(length - 1))
    return Walk(nodes, tag)


class UniformWalker(WalkGenerator):
    tag = "deepwalk"

    def generate(self, g, start, length, rng):
        return uniform_walk(g, start, length, rng, tag=self.tag)


@dataclass(frozen=True)
class WalkPool:
    generator_tag: str
    pool_size: int
    length: int
    seed: int
    walks: tuple[tuple[Walk, ...], ...]

    def __len__(self):
        return sum(len(w) for w in self.walks)

    def __eq__(self, other):
        if not isinstance(other, WalkPool):
            return NotImplemented
        return (self.generator_tag, self.pool_size, self.length, self.seed) == (
            other.generator_tag, other.pool_size, other.length, other.seed) and all(
            a == b for ws, os in zip(self.walks, other.walks) for a, b in zip(ws, os)
        ) and len(self.walks) == len(other.walks)


def build_pool(g: Graph, gen: WalkGenerator, pool_size: int, length: int | None = None,
               seed: int = 0, workers: int = 1) -> WalkPool:
    """``pool_size`` walks per node; walk ``i`` of node ``v`` uses stream ``(seed, v, i)``."""
    if pool_size < 1:
        raise ValueError(f"pool_size must be >= 1, got {pool_size}")
    length = gen.length if length is None else length

    def node_walks(v):
        return tuple(gen.generate(g, v, length, rng_for(seed, v, i)) for i in range(pool_size))

    nodes = range(g.n_nodes)
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            walks = tuple(ex.map(node_walks, nodes))
    else:
        walks = tuple(node_walks(v) for v in nodes)
    return WalkPool(gen.tag, pool_size, length, seed, walks)


def sample_from_pool(pool: WalkPool, node: int, count: int, rng: np.random.Generator) -> list[Walk]:
    """``count`` distinct entries of ``node``'s pool, chosen uniformly without replacement."""
    if count > pool.pool_size:
        raise ValueError(f"pool exhausted: requested {count} walks from a pool of {pool.pool_size}")
    if count < 0:
        raise ValueError("count must be non-negative")
    picks = rng.choice(pool.pool_size, size=count, replace=False)
    entries = pool.walks[node]
    return [entries[i] for i in picks]


# -- file formats ------------------------------------------------------------

def write_corpus(walks: Sequence[Walk], g: Graph, sink: TextIO, tag_sink: TextIO | None = None) -> None:
    """One walk per line as space-separated node names.

    Generator tags, when wanted, go to ``tag_sink`` (one tag per line,
    aligned with the corpus lines) so the corpus itself stays plain.
    """
    names = g.node_names
    for w in walks:
        sink.write(" ".join(names[v] for v in w.nodes))
        sink.write("\n")
        if tag_sink is not None:
            tag_sink.write(f"{w.generator_tag}\n")


def read_corpus(source: TextIO, g: Graph, tag_source: TextIO | None = None,
                default_tag: str = "") -> list[Walk]:
    tags = None
    if tag_source is not None:
        tags = [t.strip() for t in tag_source if t.strip()]
    walks = []
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            nodes = np.array([g.node_id(t) for t in line.split()], dtype=np.int64)
        except KeyError as e:
            raise GraphFormatError(f"line {lineno}: {e.args[0]}") from None
        tag = tags[len(walks)] if tags is not None else default_tag
        walks.append(Walk(nodes, tag))
    if tags is not None and len(tags) != len(walks):
        raise GraphFormatError(f"tag file has {len(tags)} entries for {len(walks)} walks")
    return walks


_POOL_HEADER = re.compile(
    r"#\s*pool\s+generator=(?P<tag>\S+)\s+pool_size=(?P<size>\d+)\s+length=(?P<length>\d+)\s+seed=(?P<seed>-?\d+)")


def write_pool(pool: WalkPool, g: Graph, sink: TextIO) -> None:
    sink.write(f"# pool generator={pool.generator_tag} pool_size={pool.pool_size} "
               f"length={pool.length} seed={pool.seed}\n")
    for entries in pool.walks:
        write_corpus(entries, g, sink)


def read_pool(source: TextIO, g: Graph) -> WalkPool:
    header = source.readline()
    m = _POOL_HEADER.match(header.strip())
    if not m:
        raise GraphFormatError(f"not a pool file: bad header {header.strip()!r}")
    tag, size = m["tag"], int(m["size"])
    walks = read_corpus(source, g, default_tag=tag)
    if len(walks) != size * g.n_nodes:
        raise GraphFormatError(f"pool file has {len(walks)} walks, expected {size * g.n_nodes}")
    grouped = tuple(tuple(walks[v * size:(v + 1) * size]) for v in range(g.n_nodes))
    for v, entries in enumerate(grouped):
        if any(w.start != v for w in entries):
            raise GraphFormatError(f"pool entries for node {g.node_names[v]!r} are out of order")
    return WalkPool(tag, size, int(m["length"]), int(m["seed"]), grouped)
