"""Command-line entry point.

Stages compose through files::

    multiwalk pool  graph.txt --generator deepwalk  --size 30 --seed 1 -o dw.pool
    multiwalk pool  graph.txt --generator struc2vec --size 30 --seed 2 -o s2v.pool
    multiwalk mix   graph.txt --pools dw.pool s2v.pool --mix 7:3 --seed 3 -o corpus.txt
    multiwalk embed graph.txt corpus.txt --dim 128 --seed 4 -o emb.txt
    multiwalk evaluate graph.txt labels.txt --embedding 7+3=emb.txt --seed 5 -o reports/

or all at once with ``multiwalk experiment config.yaml``.

Exit codes: 0 ok, 1 usage error, 2 data error, 3 internal error.
"""
from __future__ import annotations

import argparse
import contextlib
import logging
import sys
from pathlib import Path

from .embed import SkipGramParams, read_embeddings, train, write_embeddings
from .evaluate import SplitSpec, run_experiment, write_report_csv, write_report_json
from .experiment import ConfigError, ExperimentConfig, StageError
from .experiment import run as run_pipeline
from .graph import GraphFormatError, connected_components, load_edge_list, load_labels
from .multiwalk import MixPair, generate_corpus, generate_corpus_from_pools
from .structwalk import StructuralWalker
from .walkgen import UniformWalker, build_pool, read_corpus, read_pool, write_corpus, write_pool

log = logging.getLogger("multiwalk")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return v


def _mix(text):
    try:
        pair = MixPair.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))
    if pair.total < 1:
        raise argparse.ArgumentTypeError(f"mix {text!r} produces no walks; at least one count must be positive")
    return pair


def _open_out(path):
    if path in (None, "-"):
        return contextlib.nullcontext(sys.stdout)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", encoding="utf-8")


def _walker(args, g):
    if args.generator == "deepwalk":
        return UniformWalker(args.length)
    return StructuralWalker.from_graph(g, args.k_max, args.length, args.stay_prob, cache_dir=args.cache_dir)


# -- commands -------------------------------------------------------------------

def cmd_stats(args):
    g = load_edge_list(args.edges)
    deg = g.degrees
    print(f"nodes: {g.n_nodes}, edges: {g.n_edges}")
    print(f"degree: min {deg.min()}, mean {deg.mean():.4f}, max {deg.max()}")
    print(f"components: {connected_components(g)}")
    if args.labels:
        labels = load_labels(args.labels, g)
        kind = "multi-label" if labels.multi_label else "single-label"
        print(f"labelled: {len(labels.labels)}, classes: {labels.n_classes} ({kind})")


def cmd_walks(args):
    g = load_edge_list(args.edges)
    corpus = generate_corpus(g, [(_walker(args, g), args.walks_per_node)], args.seed)
    tags = open(args.tags, "w", encoding="utf-8") if args.tags else None
    with _open_out(args.out) as fh:
        write_corpus(corpus, g, fh, tags)
    if tags:
        tags.close()
    log.info("wrote %d walks", len(corpus))


def cmd_pool(args):
    g = load_edge_list(args.edges)
    pool = build_pool(g, _walker(args, g), args.size, seed=args.seed, workers=args.threads)
    with _open_out(args.out) as fh:
        write_pool(pool, g, fh)
    log.info("wrote pool of %d walks", args.size * g.n_nodes)


def cmd_mix(args):
    g = load_edge_list(args.edges)
    pools = []
    for path in args.pools:
        with open(path, encoding="utf-8") as fh:
            pools.append(read_pool(fh, g))
    by_tag = {p.generator_tag: p for p in pools}
    if len(by_tag) != len(pools) or set(by_tag) - {"deepwalk", "struc2vec"}:
        raise UsageError("--pools takes at most one deepwalk pool and one struc2vec pool")
    pair = args.mix
    for tag, count in (("deepwalk", pair.num_walks_dw), ("struc2vec", pair.num_walks_s2v)):
        if count and tag not in by_tag:
            raise UsageError(f"mix {pair.name} needs a {tag} pool")
    filler = pools[0]
    ordered = [by_tag.get("deepwalk", filler), by_tag.get("struc2vec", filler)]
    corpus = generate_corpus_from_pools(ordered, pair, args.seed)
    tags = open(args.tags, "w", encoding="utf-8") if args.tags else None
    with _open_out(args.out) as fh:
        write_corpus(corpus, g, fh, tags)
    if tags:
        tags.close()


def cmd_embed(args):
    g = load_edge_list(args.edges)
    with open(args.corpus, encoding="utf-8") as fh:
        corpus = read_corpus(fh, g)
    params = SkipGramParams(args.dim, args.window, args.epochs, args.negatives, args.initial_lr,
                            args.final_lr, args.seed, args.threads)
    emb = train(corpus, params)
    log.info("epoch losses: %s", " ".join(f"{x:.4f}" for x in emb.epoch_losses))
    with _open_out(args.out) as fh:
        write_embeddings(emb, g, fh)


def cmd_evaluate(args):
    g = load_edge_list(args.edges)
    labels = load_labels(args.labels, g)
    methods = {}
    for item in args.embedding:
        name, sep, path = item.partition("=")
        if not sep or not name or not path:
            raise UsageError(f"--embedding expects NAME=PATH, got {item!r}")
        if name in methods:
            raise UsageError(f"duplicate method name {name!r}")
        with open(path, encoding="utf-8") as fh:
            methods[name] = read_embeddings(fh, g)
    spec = SplitSpec(args.train_ratio, args.rounds, args.seed)
    reports = run_experiment(g, labels, methods, spec, args.dataset, args.lam, args.max_iter)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "report.json", "w", encoding="utf-8") as fh:
        write_report_json(reports, fh)
    with open(out / "macro_f1.csv", "w", encoding="utf-8") as fh:
        write_report_csv(reports, fh)
    _print_summary(reports)


def cmd_experiment(args):
    cfg = ExperimentConfig.load(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.threads is not None:
        overrides["threads"] = args.threads
    if args.out is not None:
        overrides["output"] = str(Path(args.out).resolve())
    for k, v in overrides.items():
        setattr(cfg, k, v)
    cfg.validate()
    reports = run_pipeline(cfg)
    _print_summary(reports)
    print(f"reports written to {Path(cfg.output) / 'reports'}")


def _print_summary(reports):
    width = max(len(r.method) for r in reports)
    for r in reports:
        print(f"{r.method:<{width}}  macro-F1 {r.mean:.4f} +- {r.std:.4f}  ({len(r.scores)} rounds)")


# -- parser -----------------------------------------------------------------------

def _add_common(p, seed_default=0):
    p.add_argument("--seed", type=int, default=seed_default, help="random seed (default: %(default)s)")
    p.add_argument("--threads", type=_positive, default=1,
                   help="worker threads; 1 keeps everything deterministic (default: 1)")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_walker(p, default_length=80):
    p.add_argument("--generator", choices=("deepwalk", "struc2vec"), required=True)
    p.add_argument("--length", type=_positive, default=default_length, help="walk length (default: 80)")
    p.add_argument("--k-max", type=int, default=None, help="structural layers 0..k_max (default: min(diameter, 5))")
    p.add_argument("--stay-prob", type=float, default=0.7, help="probability of a within-layer step")
    p.add_argument("--cache-dir", default=None, help="cache directory for the multilayer graph")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="multiwalk", description="Mixed-walk node embeddings.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("stats", help="summarise an edge list")
    p.add_argument("edges")
    p.add_argument("--labels", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("walks", help="generate a walk corpus from one generator")
    p.add_argument("edges")
    _add_walker(p)
    p.add_argument("--walks-per-node", type=_positive, default=10)
    p.add_argument("-o", "--out", default="-")
    p.add_argument("--tags", default=None, help="also write generator tags, one per walk")
    _add_common(p)
    p.set_defaults(func=cmd_walks)

    p = sub.add_parser("pool", help="precompute a walk pool")
    p.add_argument("edges")
    _add_walker(p)
    p.add_argument("--size", type=_positive, default=30, help="walks per start node (default: 30)")
    p.add_argument("-o", "--out", default="-")
    _add_common(p)
    p.set_defaults(func=cmd_pool)

    p = sub.add_parser("mix", help="sample a mixed corpus from pools")
    p.add_argument("edges")
    p.add_argument("--pools", nargs="+", required=True, help="pool files (deepwalk and/or struc2vec)")
    p.add_argument("--mix", type=_mix, required=True, help="walks per node as DW:S2V, e.g. 7:3")
    p.add_argument("-o", "--out", default="-")
    p.add_argument("--tags", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_mix)

    p = sub.add_parser("embed", help="train SkipGram embeddings on a corpus")
    p.add_argument("edges")
    p.add_argument("corpus")
    p.add_argument("--dim", type=_positive, default=128)
    p.add_argument("--window", type=_positive, default=10)
    p.add_argument("--epochs", type=_positive, default=5)
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument("--initial-lr", type=float, default=0.025)
    p.add_argument("--final-lr", type=float, default=1e-4)
    p.add_argument("-o", "--out", default="-")
    _add_common(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("evaluate", help="node classification over repeated splits")
    p.add_argument("edges")
    p.add_argument("labels")
    p.add_argument("--embedding", action="append", required=True, metavar="NAME=PATH")
    p.add_argument("--rounds", type=_positive, default=10)
    p.add_argument("--train-ratio", type=float, default=0.8)
    p.add_argument("--lambda", dest="lam", type=float, default=1e-4)
    p.add_argument("--max-iter", type=_positive, default=1000)
    p.add_argument("--dataset", default="")
    p.add_argument("-o", "--out", required=True, help="report directory")
    _add_common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("experiment", help="run the full protocol from a YAML config")
    p.add_argument("config")
    p.add_argument("--seed", type=int, default=None, help="override the config's root seed")
    p.add_argument("--threads", type=_positive, default=None)
    p.add_argument("-o", "--out", default=None, help="override the config's output directory")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # --help
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_DATA
    except StageError as e:
        code = EXIT_DATA if isinstance(e.cause, (ValueError, OSError)) else EXIT_INTERNAL
        print(f"error: {e} (partial outputs flagged with FAILED)", file=sys.stderr)
        return code
    except (GraphFormatError, OSError, ValueError) as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except Exception as e:
        log.exception("internal error")
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    finally:
        sys.stdout.flush()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
