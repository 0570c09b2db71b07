"""MultiWalk: node embeddings trained on a mix of walks from several generators."""
import os as _os

# numba's TBB layer is often too old on stock images; prefer OpenMP/workqueue
_os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")

from .embed import EmbeddingMatrix, NegativeSampler, SkipGramParams, build_vocab, sgns_step, train
from .evaluate import (ExperimentReport, OvrModel, SplitSpec, fit_ovr, macro_f1, predict,
                       predict_indicator, run_experiment, split)
from .graph import Graph, GraphFormatError, LabelMap, degree, from_edges, load_edge_list, load_labels
from .multiwalk import (MixPair, PlanEntry, WalkPlan, generate_corpus, generate_corpus_from_pools,
                        generate_embeddings)
from .structwalk import (MultilayerGraph, StructuralWalker, build_multilayer, degree_ring,
                         dtw_distance, structural_distance, structural_walk)
from .walkgen import UniformWalker, Walk, WalkGenerator, WalkPool, build_pool, sample_from_pool, uniform_walk

__version__ = "0.1.0"
