"""SkipGram with negative sampling over walk corpora.

For a (center, context) pair with input vector ``v`` and output vectors
``u_ctx`` / ``u_neg``, each step minimises

    -ln sigma(u_ctx . v) - sum_neg ln sigma(-u_neg . v)

with one plain SGD step on all vectors involved. Gradients are taken at the
pre-update values (all vectors move simultaneously).

Training is sequential and bit-reproducible by default. ``workers > 1``
switches to lock-free parallel (Hogwild-style) updates, which are faster on
multi-core machines but not reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, TextIO

import numba
import numpy as np

from .graph import Graph, GraphFormatError
from .seeding import derive_seed, rng_for
from .walkgen import Walk


@dataclass(frozen=True)
class SkipGramParams:
    dimension: int = 128
    window: int = 10
    epochs: int = 5
    negatives: int = 5
    initial_lr: float = 0.025
    final_lr: float = 1e-4
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.dimension < 1 or self.window < 1 or self.epochs < 1:
            raise ValueError("dimension, window and epochs must all be >= 1")
        if self.negatives < 0:
            raise ValueError("negatives must be >= 0")
        if not 0 < self.final_lr <= self.initial_lr:
            raise ValueError("need 0 < final_lr <= initial_lr")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(eq=False)
class EmbeddingMatrix:
    """Trained vectors; row ``i`` belongs to graph node ``node_ids[i]``."""
    node_ids: np.ndarray
    vectors: np.ndarray
    context_vectors: np.ndarray | None = None
    epoch_losses: list[float] = field(default_factory=list)

    def __post_init__(self):
        self._row = {int(v): i for i, v in enumerate(self.node_ids)}

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]

    def __len__(self):
        return len(self.node_ids)

    def __contains__(self, node):
        return int(node) in self._row

    def __getitem__(self, node) -> np.ndarray:
        return self.vectors[self._row[int(node)]]

    def rows(self, nodes) -> np.ndarray:
        return self.vectors[[self._row[int(v)] for v in nodes]]


class NegativeSampler:
    """Draws vocab rows with probability proportional to ``count ** power``.

    Uses Vose's alias tables so each draw costs two uniforms and one lookup.
    """

    def __init__(self, counts, power: float = 0.75):
        counts = np.asarray(counts, dtype=np.float64)
        if counts.size == 0 or np.any(counts <= 0):
            raise ValueError("negative sampler needs positive counts")
        weights = counts ** power
        self.probabilities = weights / weights.sum()
        self.accept, self.alias = _alias_tables(self.probabilities)

    def __len__(self):
        return len(self.probabilities)

    def draw(self, rng: np.random.Generator, size=None):
        n = len(self.probabilities)
        slot = np.minimum((rng.random(size) * n).astype(np.int64), n - 1)
        keep = rng.random(size) < self.accept[slot]
        return np.where(keep, slot, self.alias[slot])


def _alias_tables(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = len(p)
    scaled = p * n
    accept = np.ones(n)
    alias = np.arange(n)
    small = [i for i in range(n) if scaled[i] < 1.0]
    large = [i for i in range(n) if scaled[i] >= 1.0]
    while small and large:
        s, l = small.pop(), large.pop()
        accept[s] = scaled[s]
        alias[s] = l
        scaled[l] -= 1.0 - scaled[s]
        (small if scaled[l] < 1.0 else large).append(l)
    # leftovers are 1 up to rounding
    return accept, alias


def build_vocab(corpus: Sequence[Walk]) -> tuple[np.ndarray, np.ndarray]:
    """Distinct node ids in the corpus (ascending) and their occurrence counts."""
    if len(corpus) == 0:
        raise ValueError("empty corpus")
    tokens = np.concatenate([np.asarray(w.nodes if isinstance(w, Walk) else w, dtype=np.int64)
                             for w in corpus])
    nodes, counts = np.unique(tokens, return_counts=True)
    return nodes, counts


def _neg_log_sigmoid(x):
    # -ln sigma(x), stable for large |x|
    return np.logaddexp(0.0, -x)


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def sgns_loss(center, context, negatives) -> float:
    negatives = np.asarray(negatives).reshape(-1, len(center))
    return float(_neg_log_sigmoid(context @ center) + _neg_log_sigmoid(-(negatives @ center)).sum())


def sgns_gradients(center, context, negatives):
    """Loss and gradients w.r.t. ``center``, ``context`` and each negative row."""
    negatives = np.asarray(negatives).reshape(-1, len(center))
    pos = context @ center
    neg = negatives @ center
    loss = float(_neg_log_sigmoid(pos) + _neg_log_sigmoid(-neg).sum())
    g_pos = _sigmoid(pos) - 1.0
    g_neg = _sigmoid(neg)
    grad_center = g_pos * context + g_neg @ negatives
    grad_context = g_pos * center
    grad_negatives = np.outer(g_neg, center)
    return loss, grad_center, grad_context, grad_negatives


def sgns_step(center, context, negatives, lr: float) -> float:
    """One SGD step in place; returns the loss before the update.

    ``negatives`` is a ``(k, d)`` array updated row by row. A negative that
    appears twice therefore receives both gradient contributions.
    """
    loss, gc, gx, gn = sgns_gradients(center, context, negatives)
    center -= lr * gc
    context -= lr * gx
    negatives -= lr * gn
    return loss


# -- compiled trainer ----------------------------------------------------------

@numba.njit(cache=True, inline="always")
def _nls(x):
    if x > 0:
        return np.log1p(np.exp(-x))
    return -x + np.log1p(np.exp(x))


@numba.njit(cache=True, inline="always")
def _sig(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


@numba.njit(cache=True, fastmath=True, inline="always")
def _dot(x, y):
    # reassociation lets the reduction vectorise; the order is still fixed per build
    s = 0.0
    for t in range(len(x)):
        s += x[t] * y[t]
    return s


@numba.njit(cache=True)
def _pair_update(W, C, center, context, negs, n_neg, lr, grad):
    # same arithmetic as sgns_step: all gradients at pre-update values
    d = W.shape[1]
    v = W[center]
    u = C[context]
    pos = _dot(u, v)
    loss = _nls(pos)
    g = _sig(pos) - 1.0
    for t in range(d):
        grad[t] = g * u[t]
    for t in range(d):
        u[t] -= lr * g * v[t]
    for s in range(n_neg):
        un = C[negs[s]]
        x = _dot(un, v)
        loss += _nls(-x)
        gn = _sig(x)
        for t in range(d):
            grad[t] += gn * un[t]
        for t in range(d):
            un[t] -= lr * gn * v[t]
    for t in range(d):
        v[t] -= lr * grad[t]
    return loss


@numba.njit(cache=True)
def _draw_negatives(accept, alias, context, n_neg, negs):
    n = len(accept)
    for s in range(n_neg):
        while True:
            r = int(np.random.random() * n)
            if r >= n:
                r = n - 1
            if np.random.random() >= accept[r]:
                r = alias[r]
            if r != context:
                break
        negs[s] = r


@numba.njit(cache=True)
def _walk_pairs(W, C, tokens, lo, hi, window, accept, alias, n_neg, lr0, lr1, done, total, negs, grad):
    loss = 0.0
    pairs = 0
    for pos in range(lo, hi):
        lr = lr0 - (lr0 - lr1) * (done + pos - lo) / total
        b = np.random.randint(1, window + 1)
        start = pos - b if pos - b > lo else lo
        stop = pos + b + 1 if pos + b + 1 < hi else hi
        center = tokens[pos]
        for cpos in range(start, stop):
            if cpos == pos:
                continue
            context = tokens[cpos]
            _draw_negatives(accept, alias, context, n_neg, negs)
            loss += _pair_update(W, C, center, context, negs, n_neg, lr, grad)
            pairs += 1
    return loss, pairs


@numba.njit(cache=True)
def _train_epoch(W, C, tokens, offsets, order, window, accept, alias, n_neg, lr0, lr1, done, total, seed):
    np.random.seed(seed)
    negs = np.empty(max(n_neg, 1), dtype=np.int64)
    grad = np.empty(W.shape[1])
    loss = 0.0
    pairs = 0
    for w in order:
        lo, hi = offsets[w], offsets[w + 1]
        l, p = _walk_pairs(W, C, tokens, lo, hi, window, accept, alias, n_neg, lr0, lr1, done, total, negs, grad)
        loss += l
        pairs += p
        done += hi - lo
    return loss, pairs


@numba.njit(cache=True, parallel=True)
def _train_epoch_hogwild(W, C, tokens, offsets, order, window, accept, alias, n_neg, lr0, lr1, done, total,
                         seed, n_chunks):
    np.random.seed(seed)
    losses = np.zeros(n_chunks)
    counts = np.zeros(n_chunks, dtype=np.int64)
    per = (len(order) + n_chunks - 1) // n_chunks
    for ch in numba.prange(n_chunks):
        negs = np.empty(max(n_neg, 1), dtype=np.int64)
        grad = np.empty(W.shape[1])
        # progress is approximated per chunk: each chunk decays as if it ran alone
        local = done
        for i in range(ch * per, min((ch + 1) * per, len(order))):
            w = order[i]
            lo, hi = offsets[w], offsets[w + 1]
            l, p = _walk_pairs(W, C, tokens, lo, hi, window, accept, alias, n_neg, lr0, lr1,
                               done + (local - done) * n_chunks, total, negs, grad)
            losses[ch] += l
            counts[ch] += p
            local += hi - lo
    return losses.sum(), counts.sum()


def _flatten(corpus, row_of):
    lengths = np.array([len(w) for w in corpus], dtype=np.int64)
    offsets = np.zeros(len(corpus) + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    tokens = np.concatenate([np.asarray(w.nodes if isinstance(w, Walk) else w, dtype=np.int64)
                             for w in corpus])
    return row_of[tokens], offsets


def train(corpus: Sequence[Walk], params: SkipGramParams = SkipGramParams(),
          keep_context: bool = False, on_epoch=None) -> EmbeddingMatrix:
    """Fit SGNS vectors to a walk corpus.

    Each epoch visits the walks in a fresh seed-derived order; each center
    token draws its window radius uniformly from ``1..window``. The learning
    rate decays linearly from ``initial_lr`` to ``final_lr`` over all epochs.

    ``epoch_losses`` records the mean pre-update pair loss seen during each
    epoch. ``on_epoch(epoch, nodes, W, C)``, if given, is called after every
    epoch with the live (not copied) parameter arrays.
    """
    nodes, counts = build_vocab(corpus)
    row_of = np.full(int(nodes.max()) + 1, -1, dtype=np.int64)
    row_of[nodes] = np.arange(len(nodes))
    tokens, offsets = _flatten(corpus, row_of)

    d = params.dimension
    W = rng_for(params.seed, "init").uniform(-0.5 / d, 0.5 / d, size=(len(nodes), d))
    C = np.zeros((len(nodes), d))
    sampler = NegativeSampler(counts)
    n_neg = params.negatives if len(nodes) > 1 else 0
    total = float(params.epochs * len(tokens))

    losses = []
    done = 0
    for epoch in range(params.epochs):
        order = rng_for(params.seed, "order", epoch).permutation(len(corpus))
        seed = derive_seed(params.seed, "epoch", epoch) % (2**32)
        if params.workers > 1:
            numba.set_num_threads(min(params.workers, numba.config.NUMBA_NUM_THREADS))
            loss, pairs = _train_epoch_hogwild(W, C, tokens, offsets, order, params.window,
                                               sampler.accept, sampler.alias, n_neg, params.initial_lr,
                                               params.final_lr, done, total, seed, params.workers)
        else:
            loss, pairs = _train_epoch(W, C, tokens, offsets, order, params.window,
                                       sampler.accept, sampler.alias, n_neg, params.initial_lr,
                                       params.final_lr, done, total, seed)
        done += len(tokens)
        losses.append(loss / max(pairs, 1))
        if on_epoch is not None:
            on_epoch(epoch, nodes, W, C)
    if not np.all(np.isfinite(W)):
        raise FloatingPointError("training diverged: non-finite embedding values")
    return EmbeddingMatrix(nodes, W, C if keep_context else None, losses)


# -- word2vec text format --------------------------------------------------------

def write_embeddings(emb: EmbeddingMatrix, g: Graph, sink: TextIO) -> None:
    sink.write(f"{len(emb)} {emb.dimension}\n")
    for v, vec in zip(emb.node_ids, emb.vectors):
        sink.write(g.node_names[v] + " " + " ".join(f"{x:.6f}" for x in vec) + "\n")


def read_embeddings(source: TextIO, g: Graph) -> EmbeddingMatrix:
    header = source.readline().split()
    if len(header) != 2:
        raise GraphFormatError("embedding file must start with 'N d'")
    n, d = int(header[0]), int(header[1])
    ids = np.empty(n, dtype=np.int64)
    vecs = np.empty((n, d))
    for i in range(n):
        toks = source.readline().split()
        if len(toks) != d + 1:
            raise GraphFormatError(f"line {i + 2}: expected {d + 1} fields, got {len(toks)}")
        try:
            ids[i] = g.node_id(toks[0])
        except KeyError as e:
            raise GraphFormatError(f"line {i + 2}: {e.args[0]}") from None
        vecs[i] = [float(x) for x in toks[1:]]
    return EmbeddingMatrix(ids, vecs)
