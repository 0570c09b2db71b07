"""One-shot experiment runner: pools -> mixes -> embeddings -> reports.

The config is a flat YAML mapping whose keys mirror :class:`ExperimentConfig`.
Unknown keys are rejected. Relative paths resolve against the config file's
directory. All randomness derives from ``seed``:

=====================  ====================================
stage                  seed
=====================  ====================================
pool for generator t   ``derive_seed(seed, "pool", t)``
corpus of method m     ``derive_seed(seed, "mix", m)``
training of method m   ``derive_seed(seed, "train", m)``
train/test splits      ``derive_seed(seed, "split")``
=====================  ====================================

With ``regenerate_per_round`` the corpus and training seeds also take the
round index as a final path component. The resolved seeds are written to
``config.resolved.yaml`` so any stage can be rerun alone via the CLI.

Output layout under ``output``::

    config.resolved.yaml
    pools/{deepwalk,struc2vec}.txt
    corpora/<method>.txt, corpora/<method>.tags
    embeddings/<method>.txt
    reports/report.json, reports/macro_f1.csv
"""
from __future__ import annotations

import dataclasses
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .embed import SkipGramParams, read_embeddings, train, write_embeddings
from .evaluate import SplitSpec, run_experiment, write_report_csv, write_report_json
from .graph import load_edge_list, load_labels
from .multiwalk import MixPair, generate_corpus_from_pools
from .seeding import derive_seed
from .structwalk import StructuralWalker
from .walkgen import UniformWalker, build_pool, write_corpus, write_pool

log = logging.getLogger(__name__)

DEFAULT_ROSTER = ("DW", "S2V", "9:1", "7:3", "5:5", "3:7", "1:9")


class ConfigError(ValueError):
    pass


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class ExperimentConfig:
    edges: str
    labels: str
    output: str
    dataset: str = ""
    seed: int = 0
    threads: int = 1
    pool_size: int = 30
    dw_length: int = 80
    s2v_length: int = 80
    k_max: int | None = None
    stay_prob: float = 0.7
    cache_dir: str | None = None
    dimension: int = 128
    window: int = 10
    epochs: int = 5
    negatives: int = 5
    initial_lr: float = 0.025
    final_lr: float = 1e-4
    walks_per_node: int = 10
    roster: list = field(default_factory=lambda: list(DEFAULT_ROSTER))
    rounds: int = 10
    train_ratio: float = 0.8
    lam: float = 1e-4
    max_iter: int = 1000
    regenerate_per_round: bool = False

    # YAML spelling -> attribute, where they differ
    _ALIASES = {"lambda": "lam"}

    @classmethod
    def from_mapping(cls, data: dict, base_dir: str | Path = ".") -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a mapping of keys to values")
        names = {f.name for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, value in data.items():
            attr = cls._ALIASES.get(key, key)
            if attr not in names:
                raise ConfigError(f"unknown config key {key!r}")
            kwargs[attr] = value
        for required in ("edges", "labels", "output"):
            if required not in kwargs:
                raise ConfigError(f"missing required config key {required!r}")
        base = Path(base_dir)
        for key in ("edges", "labels", "output", "cache_dir"):
            if kwargs.get(key) is not None:
                kwargs[key] = str((base / str(kwargs[key])).resolve())
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        path = Path(path)
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
        return cls.from_mapping(data or {}, path.parent)

    def validate(self) -> None:
        for key in ("pool_size", "dw_length", "s2v_length", "dimension", "window", "epochs",
                    "walks_per_node", "rounds", "max_iter", "threads"):
            if int(getattr(self, key)) < 1:
                raise ConfigError(f"{key} must be a positive integer")
        if not self.roster:
            raise ConfigError("roster must list at least one method")
        for entry in self.roster:
            pair = roster_pair(entry, self.walks_per_node)
            if max(pair.num_walks_dw, pair.num_walks_s2v) > self.pool_size:
                raise ConfigError(f"roster entry {entry!r} needs more walks than pool_size={self.pool_size}")
        SplitSpec(self.train_ratio, self.rounds)
        self.skipgram(0)

    def check_paths(self) -> None:
        for key in ("edges", "labels"):
            if not os.path.exists(getattr(self, key)):
                raise FileNotFoundError(f"{key} file not found: {getattr(self, key)}")

    def skipgram(self, seed: int) -> SkipGramParams:
        return SkipGramParams(self.dimension, self.window, self.epochs, self.negatives,
                              self.initial_lr, self.final_lr, seed, self.threads)

    def to_mapping(self) -> dict:
        out = dataclasses.asdict(self)
        out["lambda"] = out.pop("lam")
        return out


def roster_pair(entry, walks_per_node: int) -> MixPair:
    key = str(entry).strip()
    if key.upper() in ("DW", "DEEPWALK"):
        return MixPair(walks_per_node, 0)
    if key.upper() in ("S2V", "STRUC2VEC"):
        return MixPair(0, walks_per_node)
    try:
        pair = MixPair.parse(key)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    if pair.total < 1:
        raise ConfigError(f"roster entry {key!r} produces no walks")
    return pair


def roster_name(entry) -> str:
    key = str(entry).strip()
    if key.upper() in ("DW", "DEEPWALK"):
        return "DeepWalk"
    if key.upper() in ("S2V", "STRUC2VEC"):
        return "struc2vec"
    return MixPair.parse(key).name


def resolved_seeds(cfg: ExperimentConfig) -> dict:
    seeds = {
        "pool": {t: derive_seed(cfg.seed, "pool", t) for t in ("deepwalk", "struc2vec")},
        "split": derive_seed(cfg.seed, "split"),
        "mix": {},
        "train": {},
    }
    for entry in cfg.roster:
        name = roster_name(entry)
        if cfg.regenerate_per_round:
            seeds["mix"][name] = [derive_seed(cfg.seed, "mix", name, r) for r in range(cfg.rounds)]
            seeds["train"][name] = [derive_seed(cfg.seed, "train", name, r) for r in range(cfg.rounds)]
        else:
            seeds["mix"][name] = derive_seed(cfg.seed, "mix", name)
            seeds["train"][name] = derive_seed(cfg.seed, "train", name)
    return seeds


def _file_stem(name: str) -> str:
    return name.replace("+", "_")


def run(cfg: ExperimentConfig):
    """Run the full protocol; returns the list of :class:`ExperimentReport`."""
    out = Path(cfg.output)
    for sub in ("pools", "corpora", "embeddings", "reports"):
        (out / sub).mkdir(parents=True, exist_ok=True)
    failed = out / "FAILED"
    if failed.exists():
        failed.unlink()
    seeds = resolved_seeds(cfg)
    with open(out / "config.resolved.yaml", "w", encoding="utf-8") as fh:
        yaml.safe_dump({"config": cfg.to_mapping(), "seeds": seeds}, fh, sort_keys=True)

    stage = "load"
    try:
        cfg.check_paths()
        g = load_edge_list(cfg.edges)
        labels = load_labels(cfg.labels, g)
        log.info("graph: %d nodes, %d edges; %d labelled", g.n_nodes, g.n_edges, len(labels.labels))

        pairs = {roster_name(e): roster_pair(e, cfg.walks_per_node) for e in cfg.roster}
        need_s2v = any(p.num_walks_s2v for p in pairs.values())

        stage = "pool:deepwalk"
        dw_pool = build_pool(g, UniformWalker(cfg.dw_length), cfg.pool_size,
                             seed=seeds["pool"]["deepwalk"], workers=cfg.threads)
        with open(out / "pools" / "deepwalk.txt", "w", encoding="utf-8") as fh:
            write_pool(dw_pool, g, fh)
        pools = [dw_pool, None]
        if need_s2v:
            stage = "pool:struc2vec"
            walker = StructuralWalker.from_graph(g, cfg.k_max, cfg.s2v_length, cfg.stay_prob,
                                                 cache_dir=cfg.cache_dir)
            log.info("multilayer graph built with k_max=%d", walker.ml.k_max)
            s2v_pool = build_pool(g, walker, cfg.pool_size, seed=seeds["pool"]["struc2vec"],
                                  workers=cfg.threads)
            with open(out / "pools" / "struc2vec.txt", "w", encoding="utf-8") as fh:
                write_pool(s2v_pool, g, fh)
            pools[1] = s2v_pool
        else:
            # a zero-count slot is never sampled; reuse the uniform pool as filler
            pools[1] = dw_pool

        methods = {}
        for name, pair in pairs.items():
            stage = f"embed:{name}"
            if cfg.regenerate_per_round:
                methods[name] = _per_round_source(cfg, g, pools, pair, name, seeds, out)
            else:
                methods[name] = _materialise(cfg, g, pools, pair, seeds["mix"][name],
                                             seeds["train"][name], out, _file_stem(name))
            log.info("method %s ready", name)

        stage = "evaluate"
        spec = SplitSpec(cfg.train_ratio, cfg.rounds, seeds["split"])
        reports = run_experiment(g, labels, methods, spec, cfg.dataset, cfg.lam, cfg.max_iter,
                                 config={"root_seed": cfg.seed})
        with open(out / "reports" / "report.json", "w", encoding="utf-8") as fh:
            write_report_json(reports, fh)
        with open(out / "reports" / "macro_f1.csv", "w", encoding="utf-8") as fh:
            write_report_csv(reports, fh)
        return reports
    except Exception as e:
        failed.write_text(f"stage: {stage}\nerror: {type(e).__name__}: {e}\n"
                          "outputs in this directory are partial\n", encoding="utf-8")
        raise StageError(stage, e) from e


def _materialise(cfg, g, pools, pair, mix_seed, train_seed, out, stem):
    corpus = generate_corpus_from_pools(pools, pair, mix_seed)
    with open(out / "corpora" / f"{stem}.txt", "w", encoding="utf-8") as fh, \
            open(out / "corpora" / f"{stem}.tags", "w", encoding="utf-8") as th:
        write_corpus(corpus, g, fh, th)
    emb = train(corpus, cfg.skipgram(train_seed))
    path = out / "embeddings" / f"{stem}.txt"
    with open(path, "w", encoding="utf-8") as fh:
        write_embeddings(emb, g, fh)
    # evaluate what was written, so stage-by-stage reruns match exactly
    with open(path, encoding="utf-8") as fh:
        return read_embeddings(fh, g)


def _per_round_source(cfg, g, pools, pair, name, seeds, out):
    def source(r):
        return _materialise(cfg, g, pools, pair, seeds["mix"][name][r], seeds["train"][name][r],
                            out, f"{_file_stem(name)}.r{r}")
    return source
