"""End-to-end pipeline: ingest, score/filter, matrix, fit, analyze, index.

Every stage persists its artifacts under one output directory so any
later stage (or the service) can reload them without refitting. All
randomness flows from the single seed in PipelineConfig; rerunning with
identical inputs reproduces byte-identical numeric artifacts.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import __version__
from .errors import ArtifactError, ConfigError, PipelineError
from . import analysis as an
from . import lda as topic_engine
from . import matrix as mx
from . import report
from .facts import FactsStore, ingest_facts
from .query import QueryIndex, build_index
from .scoring import MethodScoreTable, filter_methods, score_methods, score_report
from .traces import (
    ManifestEntry,
    Trace,
    compress_trace,
    corpus_counts,
    corpus_stats,
    ingest_manifest,
    read_manifest,
    stats_table,
    write_manifest,
)

log = logging.getLogger(__name__)

STAGES = ("ingest", "score", "matrix", "lda", "analyze", "index")

A_CORPUS_MANIFEST = "corpus_manifest.tsv"
A_CORPUS_STATS = "corpus_stats.tsv"
A_SCORES = "scores.tsv"
A_KEPT = "kept_methods.txt"
A_MATRIX = "matrix.txt"
A_MATRIX_ROWS = "matrix_rows.txt"
A_VOCABULARY = "vocabulary.txt"
A_METHOD_TERMS = "method_terms.tsv"
A_TRACE_METHOD = "trace_method.tsv"
A_THETA = "theta.tsv"
A_PHI = "phi.tsv"
A_TOP_WORDS = "topics_top_words.tsv"
A_LL_HISTORY = "ll_history.tsv"
A_ASSIGNMENTS = "assignments.tsv"
A_CTM = "class_topic_matrix.tsv"
A_CLOSURE = "class_closure.tsv"
A_CATEGORIES = "categories.tsv"
A_CLUSTERS = "clusters.tsv"
A_HEATMAP = "heatmap.tsv"
A_ANALYSIS_JSON = "analysis.json"
A_INDEX = "query_index.json"
A_MANIFEST = "manifest.json"
A_FIG_HEATMAP = "figures/heatmap.png"
A_FIG_CLUSTERS = "figures/clusters.png"

REQUIRED_ARTIFACTS = (
    A_CORPUS_MANIFEST,
    A_CORPUS_STATS,
    A_SCORES,
    A_KEPT,
    A_MATRIX,
    A_MATRIX_ROWS,
    A_VOCABULARY,
    A_METHOD_TERMS,
    A_TRACE_METHOD,
    A_THETA,
    A_PHI,
    A_TOP_WORDS,
    A_LL_HISTORY,
    A_CTM,
    A_CLOSURE,
    A_CATEGORIES,
    A_CLUSTERS,
    A_HEATMAP,
    A_ANALYSIS_JSON,
    A_INDEX,
    A_MANIFEST,
)


@dataclass(frozen=True)
class PipelineConfig:
    """Everything a full run needs; file values lose to CLI flags."""

    manifest: str | None = None
    facts: str | None = None
    out: str | None = None
    score_threshold: float | None = None
    num_topics: int = 30
    alpha: float | None = None
    beta: float = 0.1
    iterations: int = 1000
    seed: int = 0
    top_n: int = 5
    cosine_threshold: float = 0.6
    cut_lambda: float = 0.912
    marked_only: bool = False
    include_class_context: bool = False
    per_row_shades: bool = False
    dump_assignments: bool = False

    def __post_init__(self):
        if self.num_topics < 1:
            raise ConfigError("num_topics must be >= 1")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if self.top_n < 1:
            raise ConfigError("top_n must be >= 1")
        if self.alpha is not None and self.alpha <= 0:
            raise ConfigError("alpha must be > 0")
        if self.beta <= 0:
            raise ConfigError("beta must be > 0")
        if self.score_threshold is not None and self.score_threshold < 0:
            raise ConfigError("score_threshold must be >= 0")
        if not 0.0 < self.cosine_threshold <= 1.0:
            raise ConfigError("cosine_threshold must be in (0, 1]")
        if not 0.0 <= self.cut_lambda <= 1.0:
            raise ConfigError("cut_lambda must be in [0, 1]")

    def require_run_inputs(self) -> None:
        missing = [
            name
            for name, value in (
                ("manifest", self.manifest),
                ("facts", self.facts),
                ("out", self.out),
                ("score_threshold", self.score_threshold),
            )
            if value is None
        ]
        if missing:
            raise ConfigError(
                "missing required config: " + ", ".join(missing)
            )

    def lda_config(self) -> topic_engine.LdaConfig:
        return topic_engine.LdaConfig(
            num_topics=self.num_topics,
            alpha=self.alpha,
            beta=self.beta,
            iterations=self.iterations,
            seed=self.seed,
            top_n=self.top_n,
        )

    def to_payload(self) -> dict:
        return dataclasses.asdict(self)


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(PipelineConfig)}
_BOOL_FIELDS = {
    "marked_only",
    "include_class_context",
    "per_row_shades",
    "dump_assignments",
}
_INT_FIELDS = {"num_topics", "iterations", "seed", "top_n"}
_FLOAT_FIELDS = {
    "score_threshold",
    "alpha",
    "beta",
    "cosine_threshold",
    "cut_lambda",
}


def _coerce(key: str, raw: str):
    if key in _BOOL_FIELDS:
        low = raw.lower()
        if low in ("true", "yes", "1"):
            return True
        if low in ("false", "no", "0"):
            return False
        raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
    try:
        if key in _INT_FIELDS:
            return int(raw)
        if key in _FLOAT_FIELDS:
            return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: malformed number {raw!r}") from None
    return raw


def parse_config_file(path: str | Path) -> dict:
    """Flat key = value lines; # starts a comment; unknown keys rejected."""
    values = {}
    for line_no, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), 1
    ):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, raw = stripped.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{line_no}: expected key = value")
        key = key.strip()
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{line_no}: unknown config key {key!r}")
        values[key] = _coerce(key, raw.strip())
    return values


def build_config(
    config_path: str | Path | None = None, overrides: Mapping | None = None
) -> PipelineConfig:
    """Defaults, then file values, then flag overrides (flags win)."""
    values: dict = {}
    if config_path is not None:
        values.update(parse_config_file(config_path))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown config key {key!r}")
        values[key] = value
    return PipelineConfig(**values)


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class StageRecord:
    name: str
    started: str
    finished: str = ""
    inputs: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)


@dataclass
class RunManifest:
    """Provenance for one run: per-stage input hashes and outputs."""

    seed: int
    config: dict
    stages: list = field(default_factory=list)
    status: str = "incomplete"
    tool: str = "tracetopics"
    version: str = __version__

    def to_payload(self) -> dict:
        return {
            "tool": self.tool,
            "version": self.version,
            "seed": self.seed,
            "status": self.status,
            "config": self.config,
            "stages": [dataclasses.asdict(s) for s in self.stages],
        }

    def write(self, out_dir: Path) -> None:
        path = out_dir / A_MANIFEST
        path.write_text(
            json.dumps(self.to_payload(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )

    @classmethod
    def read(cls, out_dir: str | Path) -> "RunManifest":
        path = Path(out_dir) / A_MANIFEST
        if not path.exists():
            raise ArtifactError(f"missing run manifest {path}")
        payload = json.loads(path.read_text(encoding="utf-8"))
        manifest = cls(seed=payload["seed"], config=payload["config"])
        manifest.status = payload["status"]
        manifest.tool = payload.get("tool", "tracetopics")
        manifest.version = payload.get("version", "")
        manifest.stages = [StageRecord(**s) for s in payload["stages"]]
        return manifest

    def verify(self, out_dir: str | Path) -> list[str]:
        """Return problems: missing outputs or drifted input hashes."""
        out_dir = Path(out_dir)
        problems = []
        for stage in self.stages:
            for rel in stage.outputs:
                if not (out_dir / rel).exists():
                    problems.append(f"{stage.name}: missing output {rel}")
            for path_str, recorded in stage.inputs.items():
                p = Path(path_str)
                if not p.exists():
                    problems.append(f"{stage.name}: missing input {path_str}")
                elif _sha256(p) != recorded:
                    problems.append(f"{stage.name}: input changed {path_str}")
        return problems


def _write(out_dir: Path, rel: str, text: str) -> str:
    path = out_dir / rel
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return rel


def stage_ingest(cfg: PipelineConfig, out_dir: Path) -> list[Trace]:
    entries = read_manifest(cfg.manifest)
    corpus = ingest_manifest(cfg.manifest, marked_only=cfg.marked_only)
    normalized = [
        ManifestEntry(e.trace_id, e.use_case_id, str(Path(e.path).resolve()))
        for e in entries
    ]
    write_manifest(normalized, out_dir / A_CORPUS_MANIFEST)
    _write(out_dir, A_CORPUS_STATS, stats_table(corpus_stats(corpus)))
    return corpus


def stage_score(
    cfg: PipelineConfig, out_dir: Path, corpus: Sequence[Trace]
) -> tuple[MethodScoreTable, frozenset]:
    table = score_methods(corpus_counts(corpus))
    table, kept, _removed = filter_methods(table, cfg.score_threshold)
    _write(out_dir, A_SCORES, score_report(table))
    _write(out_dir, A_KEPT, "\n".join(sorted(kept)) + "\n")
    _write(out_dir, A_CORPUS_STATS, stats_table(corpus_stats(corpus, kept)))
    return table, kept


def stage_matrix(
    cfg: PipelineConfig,
    out_dir: Path,
    corpus: Sequence[Trace],
    kept: frozenset,
) -> tuple[mx.TraceIdentifierMatrix, FactsStore]:
    store = ingest_facts(cfg.facts)
    compressed = [compress_trace(t) for t in corpus]
    matrix = mx.build_matrix(
        compressed, kept, store, include_class_context=cfg.include_class_context
    )
    _write(out_dir, A_MATRIX, mx.export_matrix(matrix))
    _write(out_dir, A_MATRIX_ROWS, "\n".join(matrix.trace_ids) + "\n")
    _write(out_dir, A_VOCABULARY, mx.export_vocabulary(matrix))
    _write(out_dir, A_METHOD_TERMS, mx.export_method_terms(matrix))
    _write(out_dir, A_TRACE_METHOD, mx.export_trace_method(matrix))
    return matrix, store


def stage_lda(
    cfg: PipelineConfig, out_dir: Path, matrix: mx.TraceIdentifierMatrix
) -> topic_engine.TopicModel:
    model = topic_engine.fit(matrix, cfg.lda_config())
    _write(out_dir, A_THETA, topic_engine.export_theta(model))
    _write(out_dir, A_PHI, topic_engine.export_phi(model))
    _write(out_dir, A_LL_HISTORY, topic_engine.export_ll_history(model))
    n = min(cfg.top_n, model.vocab_size)
    lines = ["topic\trank\tterm\tprobability"]
    for k, words in enumerate(model.top_words(n)):
        for rank, (term, prob) in enumerate(words, 1):
            lines.append(f"topic_{k}\t{rank}\t{term}\t{prob!r}")
    _write(out_dir, A_TOP_WORDS, "\n".join(lines) + "\n")
    if cfg.dump_assignments:
        _write(out_dir, A_ASSIGNMENTS, topic_engine.export_assignments(model))
    return model


def stage_analyze(
    cfg: PipelineConfig,
    out_dir: Path,
    model: topic_engine.TopicModel,
    store: FactsStore,
    matrix: mx.TraceIdentifierMatrix,
) -> tuple[an.ClassTopicMatrix, np.ndarray, an.CategorySet, an.ClusterPartition]:
    ctm = an.class_topic_matrix(model, store, matrix.methods, matrix.method_terms)
    closure = an.maxmin_closure(an.class_similarity(ctm))
    cats = an.group_topics(model.phi, cfg.cosine_threshold)
    part = an.lambda_cut(closure, ctm.class_names, cfg.cut_lambda)
    _write(out_dir, A_CTM, an.export_ctm(ctm))
    _write(out_dir, A_CLOSURE, an.export_closure(closure, ctm.class_names))
    _write(out_dir, A_CATEGORIES, an.export_categories(cats))
    _write(out_dir, A_CLUSTERS, an.export_clusters(part))
    _write(out_dir, A_HEATMAP, an.export_heatmap(ctm, cfg.per_row_shades))
    an.write_analysis_json(out_dir / A_ANALYSIS_JSON, cats, part, ctm)
    (out_dir / "figures").mkdir(parents=True, exist_ok=True)
    report.render_heatmap(ctm, out_dir / A_FIG_HEATMAP, cfg.per_row_shades)
    report.render_clusters(part, out_dir / A_FIG_CLUSTERS)
    return ctm, closure, cats, part


def stage_index(
    cfg: PipelineConfig,
    out_dir: Path,
    model: topic_engine.TopicModel,
    ctm: an.ClassTopicMatrix,
    store: FactsStore,
    matrix: mx.TraceIdentifierMatrix,
) -> QueryIndex:
    index = build_index(
        model, ctm, store, matrix, top_n=min(cfg.top_n, model.vocab_size)
    )
    index.save(out_dir / A_INDEX)
    return index


_STAGE_OUTPUTS = {
    "ingest": [A_CORPUS_MANIFEST, A_CORPUS_STATS],
    "score": [A_SCORES, A_KEPT, A_CORPUS_STATS],
    "matrix": [A_MATRIX, A_MATRIX_ROWS, A_VOCABULARY, A_METHOD_TERMS, A_TRACE_METHOD],
    "lda": [A_THETA, A_PHI, A_TOP_WORDS, A_LL_HISTORY],
    "analyze": [
        A_CTM,
        A_CLOSURE,
        A_CATEGORIES,
        A_CLUSTERS,
        A_HEATMAP,
        A_ANALYSIS_JSON,
        A_FIG_HEATMAP,
        A_FIG_CLUSTERS,
    ],
    "index": [A_INDEX],
}


def run_pipeline(cfg: PipelineConfig) -> RunManifest:
    """Run every stage, persisting artifacts and a provenance manifest.

    A stage failure writes the partial manifest (status failed:<stage>)
    and raises PipelineError naming the stage.
    """
    cfg.require_run_inputs()
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(seed=cfg.seed, config=cfg.to_payload())

    def run_stage(name: str, inputs: list[Path], fn):
        record = StageRecord(name=name, started=_now())
        record.inputs = {str(p): _sha256(p) for p in inputs if p.exists()}
        try:
            result = fn()
        except Exception as exc:
            record.finished = _now()
            manifest.stages.append(record)
            manifest.status = f"failed:{name}"
            manifest.write(out_dir)
            raise PipelineError(name, exc) from exc
        record.finished = _now()
        record.outputs = list(_STAGE_OUTPUTS[name])
        if name == "lda" and cfg.dump_assignments:
            record.outputs.append(A_ASSIGNMENTS)
        manifest.stages.append(record)
        return result

    manifest_path = Path(cfg.manifest)
    trace_paths = [Path(e.path) for e in read_manifest(manifest_path)]
    corpus = run_stage(
        "ingest", [manifest_path, *trace_paths], lambda: stage_ingest(cfg, out_dir)
    )
    _, kept = run_stage(
        "score",
        [out_dir / A_CORPUS_MANIFEST],
        lambda: stage_score(cfg, out_dir, corpus),
    )
    matrix, store = run_stage(
        "matrix",
        [Path(cfg.facts), out_dir / A_KEPT],
        lambda: stage_matrix(cfg, out_dir, corpus, kept),
    )
    model = run_stage(
        "lda",
        [out_dir / A_MATRIX, out_dir / A_VOCABULARY],
        lambda: stage_lda(cfg, out_dir, matrix),
    )
    ctm, closure, cats, part = run_stage(
        "analyze",
        [out_dir / A_PHI, out_dir / A_METHOD_TERMS, Path(cfg.facts)],
        lambda: stage_analyze(cfg, out_dir, model, store, matrix),
    )
    run_stage(
        "index",
        [out_dir / A_THETA, out_dir / A_PHI, out_dir / A_CTM],
        lambda: stage_index(cfg, out_dir, model, ctm, store, matrix),
    )
    manifest.status = "complete"
    manifest.write(out_dir)
    return manifest


def load_corpus(out_dir: str | Path, marked_only: bool = False) -> list[Trace]:
    return ingest_manifest(Path(out_dir) / A_CORPUS_MANIFEST, marked_only)


def load_kept(out_dir: str | Path) -> frozenset:
    text = (Path(out_dir) / A_KEPT).read_text(encoding="utf-8")
    return frozenset(ln.strip() for ln in text.splitlines() if ln.strip())


def _read(out_dir: Path, rel: str) -> str:
    path = out_dir / rel
    if not path.exists():
        raise ArtifactError(f"missing artifact {path}")
    return path.read_text(encoding="utf-8")


def load_matrix(out_dir: str | Path) -> mx.TraceIdentifierMatrix:
    """Rebuild the TraceIdentifierMatrix from its persisted pieces."""
    out_dir = Path(out_dir)
    terms = tuple(
        ln for ln in _read(out_dir, A_VOCABULARY).splitlines() if ln.strip()
    )
    dictionary = mx.TermDictionary(terms)
    index = {t: i for i, t in enumerate(terms)}
    rows_by_term, file_dict = mx.parse_matrix_export(_read(out_dir, A_MATRIX))
    if file_dict.terms != terms:
        raise ArtifactError("vocabulary and matrix artifacts disagree")
    trace_ids = tuple(
        ln for ln in _read(out_dir, A_MATRIX_ROWS).splitlines() if ln.strip()
    )
    if len(trace_ids) != len(rows_by_term):
        raise ArtifactError("matrix row count and row-id artifact disagree")
    tm_ids, methods, bits = mx.parse_trace_method(_read(out_dir, A_TRACE_METHOD))
    if tm_ids != trace_ids:
        raise ArtifactError("trace-method factor row order disagrees")
    mt_methods, mt_vecs = mx.parse_method_terms(_read(out_dir, A_METHOD_TERMS))
    if mt_methods != methods:
        raise ArtifactError("method-identifier factor method order disagrees")
    rows = tuple(
        {index[t]: c for t, c in sorted(row.items())} for row in rows_by_term
    )
    method_terms = tuple(
        {index[t]: c for t, c in sorted(vec.items())} for vec in mt_vecs
    )
    return mx.TraceIdentifierMatrix(
        trace_ids=trace_ids,
        dictionary=dictionary,
        rows=rows,
        methods=methods,
        trace_method=bits,
        method_terms=method_terms,
    )


def load_model(out_dir: str | Path) -> topic_engine.TopicModel:
    out_dir = Path(out_dir)
    meta_t, doc_ids, theta = topic_engine.read_theta(_read(out_dir, A_THETA))
    meta_p, terms, phi = topic_engine.read_phi(_read(out_dir, A_PHI))
    if meta_t != meta_p:
        raise ArtifactError("theta and phi artifact headers disagree")
    return topic_engine.TopicModel.from_artifacts(meta_t, doc_ids, theta, terms, phi)


def load_ctm(out_dir: str | Path) -> an.ClassTopicMatrix:
    return an.parse_ctm(_read(Path(out_dir), A_CTM))


def load_closure(out_dir: str | Path) -> tuple[tuple[str, ...], np.ndarray]:
    return an.parse_closure(_read(Path(out_dir), A_CLOSURE))


def load_index(out_dir: str | Path) -> QueryIndex:
    return QueryIndex.load(Path(out_dir) / A_INDEX)


def verify_run_dir(out_dir: str | Path) -> RunManifest:
    """Check a run directory is complete and consistent for serving."""
    out_dir = Path(out_dir)
    manifest = RunManifest.read(out_dir)
    if manifest.status != "complete":
        raise ArtifactError(f"run status is {manifest.status!r}, not complete")
    missing = [
        rel for rel in REQUIRED_ARTIFACTS if not (out_dir / rel).exists()
    ]
    if missing:
        raise ArtifactError("missing artifacts: " + ", ".join(missing))
    return manifest
