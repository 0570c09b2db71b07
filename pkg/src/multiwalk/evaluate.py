"""Node-classification evaluation of embeddings.

Protocol: repeated random train/test splits of the labelled nodes, one
binary L2-regularised logistic regression per class (one-vs-rest), and
macro-F1 on the test side. Multi-label datasets use the known-label-count
rule: each test node gets its ``k`` most probable classes, where ``k`` is
its true number of labels.

Macro-F1 averages over the classes present in the test fold's ground truth
only. A class missing from a small fold therefore neither helps nor hurts.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Mapping, Sequence, TextIO

import numpy as np

from .embed import EmbeddingMatrix
from .graph import Graph, LabelMap
from .seeding import rng_for


@dataclass(frozen=True)
class SplitSpec:
    train_ratio: float = 0.8
    rounds: int = 10
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.train_ratio < 1:
            raise ValueError(f"train_ratio must lie in (0, 1), got {self.train_ratio}")
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds}")


def split(nodes, spec: SplitSpec, round_index: int) -> tuple[np.ndarray, np.ndarray]:
    """Uniform random partition of ``nodes``; round ``r`` uses stream ``(seed, "split", r)``."""
    nodes = np.sort(np.asarray(nodes, dtype=np.int64))
    if len(nodes) < 2:
        raise ValueError("need at least 2 labelled nodes to split")
    n_train = math.floor(spec.train_ratio * len(nodes) + 0.5)
    if n_train == 0 or n_train == len(nodes):
        raise ValueError(f"split of {len(nodes)} nodes at ratio {spec.train_ratio} leaves an empty side")
    perm = rng_for(spec.seed, "split", round_index).permutation(nodes)
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


# -- one-vs-rest logistic regression ----------------------------------------------

@dataclass
class OvrModel:
    """Per-class weights (``d x C``) and biases over the trained classes.

    ``classes`` are the class indices (into the label map's class tuple)
    that had at least one positive training example; ``skipped`` lists the
    rest.
    """
    weights: np.ndarray
    biases: np.ndarray
    classes: np.ndarray
    n_classes: int
    lam: float = 1e-4
    max_iter: int = 1000
    tol: float = 1e-5
    skipped: tuple[int, ...] = ()
    iterations: int = 0
    loss_history: list = field(default_factory=list, repr=False)


def _losses(X, Y, W, b, lam):
    Z = X @ W + b
    data = (np.logaddexp(0.0, Z) - Y * Z).mean(axis=0)
    return data + 0.5 * lam * (W * W).sum(axis=0)


def _gradients(X, Y, W, b, lam):
    Z = X @ W + b
    R = 0.5 * (1.0 + np.tanh(0.5 * Z)) - Y
    n = X.shape[0]
    return X.T @ R / n + lam * W, R.mean(axis=0)


def logistic_loss_and_grad(X, y, w, b, lam):
    """Single-class regularised log loss and its gradient ``(loss, grad_w, grad_b)``."""
    Y = np.asarray(y, dtype=np.float64)[:, None]
    W = np.asarray(w, dtype=np.float64)[:, None]
    B = np.array([b], dtype=np.float64)
    gw, gb = _gradients(X, Y, W, B, lam)
    return float(_losses(X, Y, W, B, lam)[0]), gw[:, 0], float(gb[0])


def fit_ovr(X, Y, lam: float = 1e-4, max_iter: int = 1000, tol: float = 1e-5,
            track_loss: bool = False) -> OvrModel:
    """Full-batch gradient descent per class with Armijo backtracking from step 1.

    ``Y`` is a boolean ``N x C`` membership matrix (or a vector of class
    indices for single-label data). Iteration stops once every class's
    gradient max-norm drops below ``tol`` or after ``max_iter`` steps.
    """
    X = np.asarray(X, dtype=np.float64)
    if not np.all(np.isfinite(X)):
        raise ValueError("non-finite features")
    Y = np.asarray(Y)
    if Y.ndim == 1:
        onehot = np.zeros((len(Y), int(Y.max()) + 1), dtype=bool)
        onehot[np.arange(len(Y)), Y] = True
        Y = onehot
    n_classes = Y.shape[1]
    present = np.flatnonzero(Y.any(axis=0))
    skipped = tuple(int(c) for c in np.flatnonzero(~Y.any(axis=0)))
    T = Y[:, present].astype(np.float64)
    d, C = X.shape[1], len(present)
    W = np.zeros((d, C))
    b = np.zeros(C)
    loss = _losses(X, T, W, b, lam)
    history = [loss.copy()] if track_loss else []
    it = 0
    for it in range(1, max_iter + 1):
        gw, gb = _gradients(X, T, W, b, lam)
        gmax = np.maximum(np.abs(gw).max(axis=0, initial=0.0), np.abs(gb))
        active = gmax >= tol
        if not active.any():
            it -= 1
            break
        sq = (gw * gw).sum(axis=0) + gb * gb
        step = np.where(active, 1.0, 0.0)
        for _ in range(60):
            trial = _losses(X, T, W - step * gw, b - step * gb, lam)
            bad = active & (trial > loss - 0.5 * step * sq)
            if not bad.any():
                break
            step = np.where(bad, 0.5 * step, step)
        else:
            trial = np.where(bad, loss, trial)
            step = np.where(bad, 0.0, step)
        W -= step * gw
        b -= step * gb
        loss = trial
        if track_loss:
            history.append(loss.copy())
    return OvrModel(W, b, present, n_classes, lam, max_iter, tol, skipped, it, history)


def predict_proba(model: OvrModel, X) -> np.ndarray:
    """``N x n_classes`` per-class probabilities; untrained classes get -1 so they rank last."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    P = np.full((X.shape[0], model.n_classes), -1.0)
    Z = X @ model.weights + model.biases
    P[:, model.classes] = 0.5 * (1.0 + np.tanh(0.5 * Z))
    return P


def predict_indicator(model: OvrModel, X, k_true=None) -> np.ndarray:
    """Boolean ``N x n_classes`` predictions.

    Without ``k_true``: one class per row (argmax, ties to the smallest
    class index). With ``k_true``: the ``k_true[i]`` most probable classes
    for row ``i``.
    """
    P = predict_proba(model, X)
    out = np.zeros(P.shape, dtype=bool)
    if k_true is None:
        out[np.arange(len(P)), P.argmax(axis=1)] = True
        return out
    k_true = np.broadcast_to(np.asarray(k_true, dtype=np.int64), (len(P),))
    order = np.argsort(-P, axis=1, kind="stable")
    for i, k in enumerate(k_true):
        out[i, order[i, :k]] = True
    return out


def predict(model: OvrModel, x, k_true: int | None = None) -> set[int]:
    """Predicted class indices for a single embedding vector."""
    row = predict_indicator(model, np.asarray(x)[None, :], None if k_true is None else [k_true])[0]
    return set(int(c) for c in np.flatnonzero(row))


# -- metrics ----------------------------------------------------------------------

def _as_indicator(items, classes):
    col = {c: j for j, c in enumerate(classes)}
    out = np.zeros((len(items), len(classes)), dtype=bool)
    for i, item in enumerate(items):
        if isinstance(item, (set, frozenset, list, tuple)):
            for c in item:
                out[i, col[c]] = True
        else:
            out[i, col[item]] = True
    return out


def macro_f1(predictions, truth, classes: Sequence | None = None) -> float:
    """Unweighted mean F1 over the classes that occur in ``truth``.

    Arguments are boolean ``N x C`` matrices, or equal-length sequences of
    labels / label sets (with ``classes`` optional to fix the column set).
    Per class, F1 is ``2TP / (2TP + FP + FN)``. That equals the harmonic
    mean of precision and recall, and is 0 when there are no true positives.
    """
    if len(truth) == 0:
        raise ValueError("empty test set")
    if len(predictions) != len(truth):
        raise ValueError("predictions and truth cover different numbers of nodes")
    P, T = np.asarray(predictions), np.asarray(truth)
    if not (P.dtype == bool and T.dtype == bool and P.ndim == 2):
        if classes is None:
            seen = set()
            for item in list(predictions) + list(truth):
                seen.update(item if isinstance(item, (set, frozenset, list, tuple)) else [item])
            classes = sorted(seen, key=str)
        P, T = _as_indicator(predictions, classes), _as_indicator(truth, classes)
    tp = (P & T).sum(axis=0)
    fp = (P & ~T).sum(axis=0)
    fn = (~P & T).sum(axis=0)
    present = T.any(axis=0)
    f1 = 2 * tp[present] / (2 * tp[present] + fp[present] + fn[present])
    return float(f1.mean())


# -- experiments --------------------------------------------------------------------

@dataclass
class ExperimentReport:
    method: str
    dataset: str
    scores: list[float]
    config: dict = field(default_factory=dict)
    skipped_classes: list[list[int]] = field(default_factory=list)

    @property
    def mean(self) -> float:
        return float(np.mean(self.scores))

    @property
    def std(self) -> float:
        # population standard deviation over rounds
        return float(np.std(self.scores))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mean"] = self.mean
        d["std"] = self.std
        return d


EmbeddingSource = EmbeddingMatrix | Callable[[int], EmbeddingMatrix]


def evaluate_round(emb: EmbeddingMatrix, labels: LabelMap, train_ids, test_ids,
                   lam: float = 1e-4, max_iter: int = 1000) -> tuple[float, tuple[int, ...]]:
    missing = [int(v) for v in np.concatenate([train_ids, test_ids]) if v not in emb]
    if missing:
        raise ValueError(f"{len(missing)} labelled nodes have no embedding (e.g. node id {missing[0]})")
    model = fit_ovr(emb.rows(train_ids), labels.indicator(train_ids), lam, max_iter)
    truth = labels.indicator(test_ids)
    k_true = truth.sum(axis=1) if labels.multi_label else None
    pred = predict_indicator(model, emb.rows(test_ids), k_true)
    return macro_f1(pred, truth), model.skipped


def run_experiment(g: Graph | None, labels: LabelMap, methods: Mapping[str, EmbeddingSource],
                   spec: SplitSpec, dataset: str = "", lam: float = 1e-4, max_iter: int = 1000,
                   config: dict | None = None) -> list[ExperimentReport]:
    """Score every method on the same per-round splits.

    A method is either a fixed :class:`EmbeddingMatrix`, trained once and
    reused across rounds, or a callable ``round -> EmbeddingMatrix`` that
    regenerates embeddings per round.
    """
    nodes = labels.nodes()
    splits = [split(nodes, spec, r) for r in range(spec.rounds)]
    reports = []
    for name, source in methods.items():
        scores, skipped = [], []
        for r, (tr, te) in enumerate(splits):
            emb = source(r) if callable(source) else source
            score, skip = evaluate_round(emb, labels, tr, te, lam, max_iter)
            scores.append(score)
            skipped.append(list(skip))
        cfg = {"train_ratio": spec.train_ratio, "rounds": spec.rounds, "split_seed": spec.seed,
               "lambda": lam, "max_iter": max_iter, **(config or {})}
        reports.append(ExperimentReport(name, dataset, scores, cfg, skipped))
    return reports


def write_report_csv(reports: Sequence[ExperimentReport], sink: TextIO) -> None:
    w = csv.writer(sink, lineterminator="\n")
    w.writerow(["method", "round", "macro_f1"])
    for rep in reports:
        for r, s in enumerate(rep.scores):
            w.writerow([rep.method, r, repr(float(s))])


def write_report_json(reports: Sequence[ExperimentReport], sink: TextIO) -> None:
    json.dump([rep.to_dict() for rep in reports], sink, indent=2, sort_keys=True)
    sink.write("\n")
