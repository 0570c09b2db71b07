"""Mixed-walk corpora and the end-to-end embedding procedure.

A :class:`WalkPlan` lists walk generators, how many walks each contributes
per start node, and each generator's walk length. For every node ``v``, in
node order, each plan entry contributes exactly its quota of walks starting
at ``v``. The corpus keeps this (node, entry, index) order. The trainer
reshuffles per epoch, so the order only matters for reproducibility.

Two corpus sources are supported:

* :func:`generate_corpus` draws fresh walks. Walk ``i`` of entry ``m`` at
  node ``v`` uses the random stream ``(seed, m, v, i)``.
* :func:`generate_corpus_from_pools` samples precomputed
  :class:`~multiwalk.walkgen.WalkPool` entries without replacement, so
  every mix ratio draws from the same walks. Node ``v`` of pool ``m`` uses
  stream ``(seed, m, v)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Sequence

from .embed import EmbeddingMatrix, SkipGramParams, train
from .graph import Graph
from .seeding import rng_for
from .walkgen import Walk, WalkGenerator, WalkPool, sample_from_pool


@dataclass(frozen=True)
class PlanEntry:
    generator: WalkGenerator
    walks_per_node: int
    length: int | None = None

    @property
    def walk_length(self) -> int:
        return self.generator.length if self.length is None else self.length


class WalkPlan(tuple):
    """Ordered plan entries; accepts ``(generator, count[, length])`` tuples."""

    def __new__(cls, entries):
        norm = []
        for e in entries:
            if not isinstance(e, PlanEntry):
                e = PlanEntry(*e)
            if e.walks_per_node < 0:
                raise ValueError(f"walks per node must be >= 0, got {e.walks_per_node}")
            if e.walk_length < 1:
                raise ValueError(f"walk length must be >= 1, got {e.walk_length}")
            norm.append(e)
        if sum(e.walks_per_node for e in norm) < 1:
            raise ValueError("plan produces no walks: total walks per node must be >= 1")
        return super().__new__(cls, norm)

    @property
    def walks_per_node(self) -> int:
        return sum(e.walks_per_node for e in self)


@dataclass(frozen=True)
class MixPair:
    num_walks_dw: int
    num_walks_s2v: int

    def __post_init__(self):
        if self.num_walks_dw < 0 or self.num_walks_s2v < 0:
            raise ValueError("walk counts must be non-negative")

    @property
    def total(self) -> int:
        return self.num_walks_dw + self.num_walks_s2v

    @property
    def name(self) -> str:
        """Name in the ``"DW+S2V"`` style used for method rosters, e.g. ``"7+3"``."""
        return f"{self.num_walks_dw}+{self.num_walks_s2v}"

    @classmethod
    def parse(cls, text: str) -> "MixPair":
        m = re.fullmatch(r"\s*(\d+)\s*[:+]\s*(\d+)\s*", text)
        if not m:
            raise ValueError(f"mix must look like 'DW:S2V', e.g. '7:3'; got {text!r}")
        return cls(int(m[1]), int(m[2]))


STANDARD_MIXES = tuple(MixPair(a, 10 - a) for a in (9, 7, 5, 3, 1))


def generate_corpus(g: Graph, plan: WalkPlan | Sequence, seed: int = 0) -> list[Walk]:
    plan = plan if isinstance(plan, WalkPlan) else WalkPlan(plan)
    corpus = []
    for v in range(g.n_nodes):
        for m, entry in enumerate(plan):
            for i in range(entry.walks_per_node):
                try:
                    walk = entry.generator.generate(g, v, entry.walk_length, rng_for(seed, m, v, i))
                except Exception as e:
                    raise RuntimeError(f"generator {entry.generator.tag!r} failed at node "
                                       f"{g.node_names[v]!r}: {e}") from e
                corpus.append(walk)
    return corpus


def generate_corpus_from_pools(pools: Sequence[WalkPool], counts: MixPair | Sequence[int],
                               seed: int = 0) -> list[Walk]:
    """Per node, ``counts[m]`` walks sampled without replacement from ``pools[m]``.

    With a :class:`MixPair`, ``pools`` is ``(uniform_pool, structural_pool)``.
    """
    if isinstance(counts, MixPair):
        counts = (counts.num_walks_dw, counts.num_walks_s2v)
    counts = tuple(counts)
    if len(counts) != len(pools):
        raise ValueError(f"{len(counts)} counts for {len(pools)} pools")
    if any(c < 0 for c in counts) or sum(counts) < 1:
        raise ValueError("pool mix produces no walks: total walks per node must be >= 1")
    for pool, c in zip(pools, counts):
        if c > pool.pool_size:
            raise ValueError(f"pool exhausted: {c} walks requested from {pool.generator_tag!r} "
                             f"pool of size {pool.pool_size}")
    n = {len(p.walks) for p in pools}
    if len(n) != 1:
        raise ValueError("pools cover different node sets")
    corpus = []
    for v in range(n.pop()):
        for m, (pool, c) in enumerate(zip(pools, counts)):
            if c:
                corpus.extend(sample_from_pool(pool, v, c, rng_for(seed, m, v)))
    return corpus


def generate_embeddings(g: Graph, source, sg: SkipGramParams, seed: int = 0,
                        counts: MixPair | Sequence[int] | None = None) -> EmbeddingMatrix:
    """Corpus generation followed by SkipGram training.

    ``source`` is a :class:`WalkPlan` (or its entry tuples) for direct
    generation, or a sequence of pools together with ``counts``.
    """
    if counts is not None:
        corpus = generate_corpus_from_pools(source, counts, seed)
    else:
        corpus = generate_corpus(g, source, seed)
    return train(corpus, sg)


def starts_per_generator(corpus: Sequence[Walk]) -> Mapping[tuple[int, str], int]:
    """Count of walks per ``(start node, generator tag)``."""
    out: dict[tuple[int, str], int] = {}
    for w in corpus:
        key = (w.start, w.generator_tag)
        out[key] = out.get(key, 0) + 1
    return out
