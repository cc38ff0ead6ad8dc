"""Command-line interface.

Stage subcommands (ingest, score, matrix, lda, analyze, index) share one
artifact directory and can be chained; run executes all of them. Exit
codes are 0 on success and a distinct nonzero code per error class.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .errors import (
    AnalysisError,
    ArtifactError,
    ConfigError,
    FactsError,
    FilterError,
    LdaError,
    MatrixError,
    PipelineError,
    QueryError,
    ScoringError,
    TraceParseError,
    TraceStructureError,
    TraceTopicsError,
)
from . import pipeline as pl
from .query import drill_down, format_drill_down_text, format_result_text, run_query
from .traces import corpus_counts, corpus_stats, ingest_manifest, stats_table
from .scoring import filter_methods, score_methods

log = logging.getLogger(__name__)

EXIT_CODES = (
    (ConfigError, 2),
    (TraceParseError, 3),
    (TraceStructureError, 3),
    (ScoringError, 4),
    (FilterError, 4),
    (FactsError, 5),
    (MatrixError, 6),
    (LdaError, 7),
    (AnalysisError, 8),
    (QueryError, 9),
    (ArtifactError, 10),
)


def exit_code_for(exc: Exception) -> int:
    if isinstance(exc, PipelineError):
        return exit_code_for(exc.cause)
    for klass, code in EXIT_CODES:
        if isinstance(exc, klass):
            return code
    return 1


def _cfg(args: argparse.Namespace) -> pl.PipelineConfig:
    """Config from the recognized flags present on this subcommand."""
    overrides = {}
    for key in (
        "manifest",
        "facts",
        "out",
        "score_threshold",
        "num_topics",
        "alpha",
        "beta",
        "iterations",
        "seed",
        "top_n",
        "cosine_threshold",
        "cut_lambda",
        "marked_only",
        "include_class_context",
        "per_row_shades",
        "dump_assignments",
    ):
        if hasattr(args, key):
            overrides[key] = getattr(args, key)
    return pl.build_config(getattr(args, "config", None), overrides)


def _out_dir(args):
    from pathlib import Path

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_ingest(args) -> int:
    cfg = _cfg(args)
    corpus = pl.stage_ingest(cfg, _out_dir(args))
    print(f"ingested {len(corpus)} trace(s) into {args.out}")
    return 0


def cmd_score(args) -> int:
    cfg = _cfg(args)
    out = _out_dir(args)
    corpus = pl.load_corpus(out, cfg.marked_only)
    table, kept = pl.stage_score(cfg, out, corpus)
    print(
        f"scored {len(table.methods)} method(s); kept {len(kept)} "
        f"at threshold {cfg.score_threshold}"
    )
    return 0


def cmd_matrix(args) -> int:
    cfg = _cfg(args)
    out = _out_dir(args)
    corpus = pl.load_corpus(out, cfg.marked_only)
    kept = pl.load_kept(out)
    matrix, _store = pl.stage_matrix(cfg, out, corpus, kept)
    print(
        f"matrix: {matrix.num_docs} trace(s) x {matrix.vocab_size} term(s), "
        f"{len(matrix.methods)} method(s)"
    )
    return 0


def cmd_lda(args) -> int:
    cfg = _cfg(args)
    out = _out_dir(args)
    matrix = pl.load_matrix(out)
    model = pl.stage_lda(cfg, out, matrix)
    last_sweep, last_ll = model.ll_history[-1]
    print(
        f"fitted {model.num_topics} topic(s) in {cfg.iterations} sweep(s); "
        f"log-likelihood {last_ll:.4f} at sweep {last_sweep}"
    )
    return 0


def cmd_analyze(args) -> int:
    from .facts import ingest_facts

    cfg = _cfg(args)
    out = _out_dir(args)
    model = pl.load_model(out)
    matrix = pl.load_matrix(out)
    store = ingest_facts(cfg.facts)
    ctm, _closure, cats, part = pl.stage_analyze(cfg, out, model, store, matrix)
    print(
        f"analyzed {len(ctm.class_names)} class(es): "
        f"{len(cats.categories)} category(ies), {len(part.clusters)} cluster(s) "
        f"at lambda {cfg.cut_lambda}"
    )
    return 0


def cmd_index(args) -> int:
    from .facts import ingest_facts

    cfg = _cfg(args)
    out = _out_dir(args)
    model = pl.load_model(out)
    matrix = pl.load_matrix(out)
    ctm = pl.load_ctm(out)
    store = ingest_facts(cfg.facts)
    index = pl.stage_index(cfg, out, model, ctm, store, matrix)
    print(f"indexed {len(index.terms)} term(s) across {index.num_topics} topic(s)")
    return 0


def cmd_run(args) -> int:
    cfg = _cfg(args)
    manifest = pl.run_pipeline(cfg)
    print(f"run complete: {len(manifest.stages)} stage(s) into {cfg.out}")
    return 0


def cmd_query(args) -> int:
    index = pl.load_index(args.out)
    if args.topic is not None:
        dd = drill_down(args.topic, index, top_n=args.limit)
        if args.json:
            print(json.dumps(dd.to_payload(), sort_keys=True))
        else:
            print(format_drill_down_text(dd), end="")
        return 0
    result = run_query(args.text, index)
    if args.json:
        print(json.dumps(result.to_payload(), sort_keys=True))
    else:
        print(format_result_text(result), end="")
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    serve(args.out, host=args.host, port=args.port, ui_dir=args.ui_dir)
    return 0


def cmd_stats(args) -> int:
    corpus = ingest_manifest(args.manifest, marked_only=args.marked_only)
    kept = None
    if args.score_threshold is not None:
        table = score_methods(corpus_counts(corpus))
        _, kept, _ = filter_methods(table, args.score_threshold)
    print(stats_table(corpus_stats(corpus, kept)), end="")
    return 0


def cmd_synth(args) -> int:
    from .synthgen import generate_project

    manifest_path = generate_project(args.out, seed=args.seed)
    print(f"synthetic project written; manifest at {manifest_path}")
    return 0


def _add_common_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--num-topics", dest="num_topics", type=int, help="topic count K")
    p.add_argument("--alpha", type=float, help="doc-topic prior (default 50/K)")
    p.add_argument("--beta", type=float, help="topic-term prior")
    p.add_argument("--iterations", type=int, help="Gibbs sweeps")
    p.add_argument("--seed", type=int, help="RNG seed")
    p.add_argument("--top-n", dest="top_n", type=int, help="words per topic")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tracetopics",
        description="Locate features by mining execution traces with topic models.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="debug logging"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse traces and write corpus artifacts")
    p.add_argument("--manifest", required=True, help="trace manifest (tsv)")
    p.add_argument("--out", required=True, help="artifact directory")
    p.add_argument("--marked-only", dest="marked_only", action="store_true")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("score", help="score methods and filter omnipresent ones")
    p.add_argument("--out", required=True)
    p.add_argument(
        "--threshold",
        dest="score_threshold",
        type=float,
        required=True,
        help="keep methods scoring at or above this",
    )
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("matrix", help="build the trace-identifier matrix")
    p.add_argument("--out", required=True)
    p.add_argument("--facts", required=True, help="code facts file (tsv)")
    p.add_argument(
        "--include-class-context",
        dest="include_class_context",
        action="store_true",
        help="fold class variables and supertypes into method vectors",
    )
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("lda", help="fit the topic model")
    p.add_argument("--out", required=True)
    _add_common_model_flags(p)
    p.add_argument(
        "--dump-assignments",
        dest="dump_assignments",
        action="store_true",
        help="also write per-token topic assignments",
    )
    p.set_defaults(func=cmd_lda)

    p = sub.add_parser("analyze", help="categories, class-topic matrix, clusters")
    p.add_argument("--out", required=True)
    p.add_argument("--facts", required=True)
    p.add_argument(
        "--cosine-threshold", dest="cosine_threshold", type=float, default=None
    )
    p.add_argument("--cut-lambda", dest="cut_lambda", type=float, default=None)
    p.add_argument(
        "--per-row-shades", dest="per_row_shades", action="store_true"
    )
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("index", help="build the query index")
    p.add_argument("--out", required=True)
    p.add_argument("--facts", required=True)
    p.add_argument("--top-n", dest="top_n", type=int, default=None)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("run", help="run every stage")
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--manifest")
    p.add_argument("--facts")
    p.add_argument("--out")
    p.add_argument("--threshold", dest="score_threshold", type=float)
    _add_common_model_flags(p)
    p.add_argument(
        "--cosine-threshold", dest="cosine_threshold", type=float, default=None
    )
    p.add_argument("--cut-lambda", dest="cut_lambda", type=float, default=None)
    p.add_argument("--marked-only", dest="marked_only", action="store_true", default=None)
    p.add_argument(
        "--include-class-context",
        dest="include_class_context",
        action="store_true",
        default=None,
    )
    p.add_argument(
        "--per-row-shades", dest="per_row_shades", action="store_true", default=None
    )
    p.add_argument(
        "--dump-assignments",
        dest="dump_assignments",
        action="store_true",
        default=None,
    )
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("query", help="query the fitted model")
    p.add_argument("--out", required=True)
    p.add_argument("text", nargs="?", default="", help="free-text feature query")
    p.add_argument("--topic", type=int, help="drill into one topic instead")
    p.add_argument("--limit", type=int, help="cap drill-down rows")
    p.add_argument("--json", action="store_true", help="structured output")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("serve", help="serve artifacts over HTTP (read-only)")
    p.add_argument("--out", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--ui-dir", dest="ui_dir", help="static UI bundle to serve")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("stats", help="per-use-case corpus statistics")
    p.add_argument("--manifest", required=True)
    p.add_argument(
        "--threshold",
        dest="score_threshold",
        type=float,
        help="also report method counts after filtering",
    )
    p.add_argument("--marked-only", dest="marked_only", action="store_true")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("synth", help="generate a synthetic micro-project")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except TraceTopicsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
