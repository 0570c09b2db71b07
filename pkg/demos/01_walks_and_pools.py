"""
Uniform walks, pools and mixed corpora
======================================

Every corpus in this package is built from walks that start at each node
a fixed number of times. Here we look at uniform walks on a small graph,
freeze them into a pool, and sample mixed corpora from two pools.
"""
import numpy as np

from multiwalk.graph import from_edges
from multiwalk.multiwalk import MixPair, generate_corpus_from_pools, starts_per_generator
from multiwalk.seeding import rng_for
from multiwalk.structwalk import StructuralWalker
from multiwalk.walkgen import UniformWalker, build_pool, sample_from_pool, uniform_walk

# a triangle with a tail: a-b-c-a plus c-d-e
g = from_edges([("a", "b"), ("b", "c"), ("c", "a"), ("c", "d"), ("d", "e")])
print("nodes:", g.node_names, "degrees:", g.degrees.tolist())

# a uniform walk picks each next node uniformly among the neighbors
w = uniform_walk(g, g.node_id("a"), 12, rng_for(0))
print("walk from a:", " ".join(g.node_names[v] for v in w.nodes))

# long walks visit nodes in proportion to their degree
visits = np.bincount(uniform_walk(g, 0, 200_000, rng_for(1)).nodes, minlength=g.n_nodes)
print("visit share:", np.round(visits / visits.sum(), 3).tolist())
print("degree share:", np.round(g.degrees / g.degrees.sum(), 3).tolist())

# pools hold a fixed set of walks per start node; every walk has its own seed
# stream, so the pool does not depend on worker count or build order
dw_pool = build_pool(g, UniformWalker(length=6), pool_size=30, seed=7)
s2v_pool = build_pool(g, StructuralWalker.from_graph(g, length=6), pool_size=30, seed=8)
print("pool entries per node:", [len(e) for e in dw_pool.walks])

# sampling is without replacement, so 10 of 30 picks each entry a third of the time
picks = sample_from_pool(dw_pool, 0, 10, rng_for(2))
print("10 sampled walks from a, first three:",
      [" ".join(g.node_names[v] for v in p.nodes) for p in picks[:3]])

# a 7:3 mix takes 7 uniform and 3 structural walks per node from the pools
corpus = generate_corpus_from_pools((dw_pool, s2v_pool), MixPair(7, 3), seed=3)
counts = starts_per_generator(corpus)
for v, name in enumerate(g.node_names):
    print(f"  {name}: {counts[(v, 'deepwalk')]} uniform + {counts[(v, 'struc2vec')]} structural")
print("corpus size:", len(corpus), "=", g.n_nodes, "x 10")
