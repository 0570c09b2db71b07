import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from multiwalk.embed import SkipGramParams, train
from multiwalk.graph import from_edges
from multiwalk.multiwalk import (STANDARD_MIXES, MixPair, WalkPlan, generate_corpus, generate_corpus_from_pools,
                                 generate_embeddings, starts_per_generator)
from multiwalk.structwalk import StructuralWalker
from multiwalk.synthetic import barbell_path
from multiwalk.walkgen import UniformWalker, WalkGenerator, Walk, build_pool

G, _ = barbell_path(4, 3)
S2V = StructuralWalker.from_graph(G, length=10)


def pools(size=10):
    return (build_pool(G, UniformWalker(10), size, seed=1), build_pool(G, S2V, size, seed=2))


def test_plan_validation():
    with pytest.raises(ValueError, match="no walks"):
        WalkPlan([(UniformWalker(80), 0), (S2V, 0)])
    with pytest.raises(ValueError):
        WalkPlan([(UniformWalker(80), -1), (S2V, 2)])
    plan = WalkPlan([(UniformWalker(80), 3), (S2V, 2, 7)])
    assert plan.walks_per_node == 5 and plan[1].walk_length == 7 and plan[0].walk_length == 80


def test_mix_pair_parse():
    assert MixPair.parse("7:3") == MixPair(7, 3)
    assert MixPair.parse("7+3").name == "7+3"
    with pytest.raises(ValueError):
        MixPair.parse("seven")
    assert [m.name for m in STANDARD_MIXES] == ["9+1", "7+3", "5+5", "3+7", "1+9"]


def test_five_five_plan():
    corpus = generate_corpus(G, [(UniformWalker(10), 5), (S2V, 5)], seed=0)
    counts = starts_per_generator(corpus)
    for v in range(G.n_nodes):
        assert counts[(v, "deepwalk")] == 5 and counts[(v, "struc2vec")] == 5


def test_corpus_order_is_node_major():
    corpus = generate_corpus(G, [(UniformWalker(6), 2), (S2V, 1)], seed=0)
    starts = [w.start for w in corpus]
    tags = [w.generator_tag for w in corpus]
    assert starts == sorted(starts)
    assert tags[:3] == ["deepwalk", "deepwalk", "struc2vec"]


def test_per_entry_lengths():
    corpus = generate_corpus(G, [(UniformWalker(80), 1, 4), (S2V, 1, 9)], seed=0)
    assert {len(w) for w in corpus if w.generator_tag == "deepwalk"} == {4}
    assert {len(w) for w in corpus if w.generator_tag == "struc2vec"} == {9}


def test_generator_errors_carry_context():
    class Broken(WalkGenerator):
        tag = "broken"

        def generate(self, g, start, length, rng):
            raise RuntimeError("boom")

    with pytest.raises(RuntimeError, match="'broken'.*node 'a0'.*boom|boom"):
        generate_corpus(G, [(Broken(5), 1)], seed=0)


def test_arbitrary_sequences_allowed():
    class Teleport(WalkGenerator):
        tag = "teleport"

        def generate(self, g, start, length, rng):
            return Walk(np.concatenate([[start], rng.integers(0, g.n_nodes, length - 1)]), self.tag)

    corpus = generate_corpus(G, [(Teleport(5), 2)], seed=0)
    assert len(corpus) == 2 * G.n_nodes


@given(st.lists(st.tuples(st.integers(0, 10), st.integers(0, 10)), min_size=1, max_size=30),
       st.lists(st.integers(0, 4), min_size=1, max_size=3).filter(lambda n: sum(n) > 0),
       st.integers(0, 1000))
def test_start_count_invariant(edges, counts, seed):
    g = from_edges(edges)
    plan = [(UniformWalker(5), c) for c in counts]
    corpus = generate_corpus(g, plan, seed)
    assert len(corpus) == g.n_nodes * sum(counts)
    per_node = np.bincount([w.start for w in corpus], minlength=g.n_nodes)
    assert np.all(per_node == sum(counts))


def test_pool_mix_counts():
    dw, s2v = pools()
    corpus = generate_corpus_from_pools((dw, s2v), MixPair(9, 1), seed=3)
    counts = starts_per_generator(corpus)
    assert len(corpus) == 10 * G.n_nodes
    for v in range(G.n_nodes):
        assert counts[(v, "deepwalk")] == 9 and counts[(v, "struc2vec")] == 1
        own = {id(w) for w in dw.walks[v]} | {id(w) for w in s2v.walks[v]}
        assert all(id(w) in own for w in corpus if w.start == v)


def test_pure_mixes():
    dw, s2v = pools()
    assert {w.generator_tag for w in generate_corpus_from_pools((dw, s2v), MixPair(10, 0))} == {"deepwalk"}
    assert {w.generator_tag for w in generate_corpus_from_pools((dw, s2v), MixPair(0, 10))} == {"struc2vec"}


def test_pool_mix_errors():
    dw, s2v = pools(5)
    with pytest.raises(ValueError, match="no walks"):
        generate_corpus_from_pools((dw, s2v), MixPair(0, 0))
    with pytest.raises(ValueError, match="pool exhausted"):
        generate_corpus_from_pools((dw, s2v), MixPair(6, 0))


def test_determinism():
    plan = [(UniformWalker(10), 2), (S2V, 2)]
    assert generate_corpus(G, plan, seed=4) == generate_corpus(G, plan, seed=4)
    dw, s2v = pools()
    assert (generate_corpus_from_pools((dw, s2v), MixPair(3, 7), 5)
            == generate_corpus_from_pools((dw, s2v), MixPair(3, 7), 5))


def test_generate_embeddings_composes():
    plan = [(UniformWalker(10), 3)]
    sg = SkipGramParams(dimension=12, epochs=1, seed=2)
    emb = generate_embeddings(G, plan, sg, seed=1)
    direct = train(generate_corpus(G, plan, 1), sg)
    assert emb.vectors.tobytes() == direct.vectors.tobytes()
    assert emb.vectors.shape == (G.n_nodes, 12)
    emb = generate_embeddings(G, pools(), sg, seed=1, counts=MixPair(2, 2))
    assert len(emb) == G.n_nodes
