"""Small synthetic graphs with known ground truth, for tests and demos."""
from __future__ import annotations

import numpy as np

from .graph import Graph, LabelMap, from_edges


def planted_partition(n_blocks: int, block_size: int, p_in: float, p_out: float,
                      seed: int = 0) -> tuple[Graph, LabelMap]:
    """Stochastic block model with equal blocks; nodes are labelled by block.

    Every node pair is drawn independently: ``p_in`` inside a block,
    ``p_out`` across blocks. Nodes are named ``0..n-1`` and registered up
    front, so isolated nodes survive.
    """
    rng = np.random.default_rng(seed)
    n = n_blocks * block_size
    block = np.repeat(np.arange(n_blocks), block_size)
    iu, ju = np.triu_indices(n, 1)
    p = np.where(block[iu] == block[ju], p_in, p_out)
    keep = rng.random(len(iu)) < p
    g = from_edges(zip(iu[keep], ju[keep]), node_names=[str(i) for i in range(n)])
    labels = {v: frozenset([str(block[v])]) for v in range(n)}
    return g, LabelMap(labels, tuple(str(b) for b in range(n_blocks)))


def barbell_path(clique_size: int = 10, path_length: int = 20) -> tuple[Graph, LabelMap]:
    """Two cliques joined through a path, labelled by structural role.

    Clique ``A`` is nodes ``a0..a{k-1}`` and clique ``B`` is ``b0..b{k-1}``.
    ``a0`` and ``b0`` attach to the ends of the path ``p0..p{L-1}``. Roles:
    ``clique`` (interior clique nodes), ``attach`` (``a0``, ``b0``) and
    ``path``.
    """
    edges = []
    for side in "ab":
        nodes = [f"{side}{i}" for i in range(clique_size)]
        edges += [(u, v) for i, u in enumerate(nodes) for v in nodes[i + 1:]]
    path = [f"p{i}" for i in range(path_length)]
    edges += list(zip(path, path[1:]))
    edges += [("a0", path[0]), ("b0", path[-1])]
    g = from_edges(edges)
    role = {}
    for v, name in enumerate(g.node_names):
        if name in ("a0", "b0"):
            role[v] = "attach"
        elif name.startswith("p"):
            role[v] = "path"
        else:
            role[v] = "clique"
    labels = {v: frozenset([r]) for v, r in role.items()}
    return g, LabelMap(labels, ("attach", "clique", "path"))
