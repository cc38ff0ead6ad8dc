"""Feature queries over the fitted model.

A built-in inverted index maps identifier terms to topics (weighted by
phi), classes, and methods (weighted by term counts), with cross-links
from topics to traces (theta), topics to classes (class-topic weights),
topics to methods, and methods to traces. Free-text queries are run
through the lexicon tokenizer, so a query matches exactly when it shares
a stem with indexed identifiers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import QueryError
from .facts import FactsStore
from .lda import TopicModel
from .analysis import ClassTopicMatrix
from .matrix import TraceIdentifierMatrix
from .tokenizer import Tokenizer, DEFAULT_TOKENIZER

INDEX_VERSION = "1"


@dataclass(frozen=True)
class QueryIndex:
    """Immutable inverted index over the model artifacts.

    All posting lists are sorted by descending weight with lexicographic
    (or ascending-id) tie-breaks, so builds are deterministic and the
    serialized form is byte-stable.
    """

    version: str
    terms: tuple[str, ...]
    num_topics: int
    term_topics: Mapping[str, tuple[tuple[int, float], ...]]
    term_classes: Mapping[str, tuple[tuple[str, float], ...]]
    term_methods: Mapping[str, tuple[tuple[str, float], ...]]
    topic_traces: Mapping[int, tuple[tuple[str, float], ...]]
    topic_classes: Mapping[int, tuple[tuple[str, float], ...]]
    topic_methods: Mapping[int, tuple[tuple[str, float], ...]]
    method_traces: Mapping[str, tuple[str, ...]]
    topic_top_words: tuple[tuple[tuple[str, float], ...], ...]

    def to_payload(self) -> dict:
        return {
            "version": self.version,
            "terms": list(self.terms),
            "num_topics": self.num_topics,
            "term_topics": {
                t: [[k, w] for k, w in posts] for t, posts in self.term_topics.items()
            },
            "term_classes": {
                t: [[c, w] for c, w in posts] for t, posts in self.term_classes.items()
            },
            "term_methods": {
                t: [[m, w] for m, w in posts] for t, posts in self.term_methods.items()
            },
            "topic_traces": {
                str(k): [[d, w] for d, w in posts]
                for k, posts in self.topic_traces.items()
            },
            "topic_classes": {
                str(k): [[c, w] for c, w in posts]
                for k, posts in self.topic_classes.items()
            },
            "topic_methods": {
                str(k): [[m, w] for m, w in posts]
                for k, posts in self.topic_methods.items()
            },
            "method_traces": {m: list(ts) for m, ts in self.method_traces.items()},
            "topic_top_words": [
                [[t, w] for t, w in words] for words in self.topic_top_words
            ],
        }

    @classmethod
    def from_payload(cls, payload: Mapping) -> "QueryIndex":
        version = payload.get("version")
        if version != INDEX_VERSION:
            raise QueryError(
                f"index version {version!r} does not match supported {INDEX_VERSION!r}"
            )
        return cls(
            version=version,
            terms=tuple(payload["terms"]),
            num_topics=int(payload["num_topics"]),
            term_topics={
                t: tuple((int(k), float(w)) for k, w in posts)
                for t, posts in payload["term_topics"].items()
            },
            term_classes={
                t: tuple((str(c), float(w)) for c, w in posts)
                for t, posts in payload["term_classes"].items()
            },
            term_methods={
                t: tuple((str(m), float(w)) for m, w in posts)
                for t, posts in payload["term_methods"].items()
            },
            topic_traces={
                int(k): tuple((str(d), float(w)) for d, w in posts)
                for k, posts in payload["topic_traces"].items()
            },
            topic_classes={
                int(k): tuple((str(c), float(w)) for c, w in posts)
                for k, posts in payload["topic_classes"].items()
            },
            topic_methods={
                int(k): tuple((str(m), float(w)) for m, w in posts)
                for k, posts in payload["topic_methods"].items()
            },
            method_traces={
                m: tuple(ts) for m, ts in payload["method_traces"].items()
            },
            topic_top_words=tuple(
                tuple((str(t), float(w)) for t, w in words)
                for words in payload["topic_top_words"]
            ),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_payload(), sort_keys=True, indent=2) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "QueryIndex":
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise QueryError(f"malformed index file {path}: {exc}") from None
        return cls.from_payload(payload)


def _desc_name(posts: list[tuple[str, float]]) -> tuple[tuple[str, float], ...]:
    return tuple(sorted(posts, key=lambda p: (-p[1], p[0])))


def _desc_id(posts: list[tuple[int, float]]) -> tuple[tuple[int, float], ...]:
    return tuple(sorted(posts, key=lambda p: (-p[1], p[0])))


def build_index(
    model: TopicModel,
    ctm: ClassTopicMatrix,
    store: FactsStore,
    matrix: TraceIdentifierMatrix,
    top_n: int | None = None,
) -> QueryIndex:
    """Assemble the index from mutually consistent artifacts."""
    if model.terms != matrix.dictionary.terms:
        raise QueryError("stale artifact: model vocabulary differs from matrix")
    if len(ctm.topic_ids) != model.num_topics:
        raise QueryError("stale artifact: class-topic matrix topic count differs")
    missing = [m for m in matrix.methods if m not in store.methods]
    if missing:
        raise QueryError(
            "stale artifact: facts store lacks methods " + ", ".join(missing)
        )

    terms = model.terms
    K = model.num_topics

    term_topics = {}
    for v, term in enumerate(terms):
        posts = [(k, float(model.phi[k, v])) for k in range(K)]
        term_topics[term] = _desc_id(posts)

    class_counts: dict[str, dict[int, int]] = {}
    method_counts: dict[str, Mapping[int, int]] = {}
    for key, vec in zip(matrix.methods, matrix.method_terms):
        method_counts[key] = vec
        cls = store.methods[key].class_name
        acc = class_counts.setdefault(cls, {})
        for v, c in vec.items():
            acc[v] = acc.get(v, 0) + c

    term_classes: dict[str, list[tuple[str, float]]] = {t: [] for t in terms}
    for cls, acc in class_counts.items():
        for v, c in acc.items():
            term_classes[terms[v]].append((cls, float(c)))
    term_methods: dict[str, list[tuple[str, float]]] = {t: [] for t in terms}
    for key, vec in method_counts.items():
        for v, c in vec.items():
            term_methods[terms[v]].append((key, float(c)))

    topic_traces = {}
    for k in range(K):
        posts = [
            (doc_id, float(model.theta[d, k]))
            for d, doc_id in enumerate(model.doc_ids)
        ]
        topic_traces[k] = _desc_name(posts)

    topic_classes = {}
    for k in range(K):
        posts = [
            (name, float(ctm.weights[i, k])) for i, name in enumerate(ctm.class_names)
        ]
        topic_classes[k] = _desc_name(posts)

    # per-method topic weights, same aggregation as the class-topic matrix
    topic_methods: dict[int, list[tuple[str, float]]] = {k: [] for k in range(K)}
    for key, vec in method_counts.items():
        raw = np.zeros(K, dtype=np.float64)
        for v, c in vec.items():
            raw += c * model.phi[:, v]
        total = float(raw.sum())
        if total <= 0:
            continue
        for k in range(K):
            topic_methods[k].append((key, float(raw[k] / total)))

    method_traces = {}
    for j, key in enumerate(matrix.methods):
        present = [
            matrix.trace_ids[i]
            for i in range(matrix.num_docs)
            if matrix.trace_method[i][j]
        ]
        method_traces[key] = tuple(sorted(present))

    return QueryIndex(
        version=INDEX_VERSION,
        terms=terms,
        num_topics=K,
        term_topics=term_topics,
        term_classes={t: _desc_name(p) for t, p in term_classes.items()},
        term_methods={t: _desc_name(p) for t, p in term_methods.items()},
        topic_traces=topic_traces,
        topic_classes=topic_classes,
        topic_methods={k: _desc_name(p) for k, p in topic_methods.items()},
        method_traces=method_traces,
        topic_top_words=model.top_words(top_n),
    )


@dataclass(frozen=True)
class TopicHit:
    topic_id: int
    score: float
    top_words: tuple[tuple[str, float], ...]


@dataclass(frozen=True)
class QueryResult:
    query: str
    terms: tuple[str, ...]
    topics: tuple[TopicHit, ...]
    notice: str | None = None

    def to_payload(self) -> dict:
        return {
            "query": self.query,
            "terms": list(self.terms),
            "topics": [
                {
                    "topic": hit.topic_id,
                    "score": hit.score,
                    "top_words": [[t, w] for t, w in hit.top_words],
                }
                for hit in self.topics
            ],
            "notice": self.notice,
        }


def run_query(
    q: str, index: QueryIndex, tokenizer: Tokenizer = DEFAULT_TOKENIZER
) -> QueryResult:
    """Score topics additively over the query's preprocessed terms."""
    tokens = tokenizer.tokenize(q)
    if not tokens:
        raise QueryError("empty query after preprocessing")
    scores = [0.0] * index.num_topics
    matched = False
    for tok in tokens:
        posts = index.term_topics.get(tok)
        if posts is None:
            continue
        matched = True
        for k, w in posts:
            scores[k] += w
    hits = [
        TopicHit(k, scores[k], index.topic_top_words[k])
        for k in range(index.num_topics)
        if scores[k] > 0.0
    ]
    hits.sort(key=lambda h: (-h.score, h.topic_id))
    notice = None
    if not hits:
        notice = (
            "no indexed term matches the query"
            if not matched
            else "no topic scored above zero"
        )
    return QueryResult(q, tuple(tokens), tuple(hits), notice)


@dataclass(frozen=True)
class DrillDown:
    """Table-shaped listing for one topic: entity, probability pairs."""

    topic_id: int
    top_words: tuple[tuple[str, float], ...]
    classes: tuple[tuple[str, float], ...]
    methods: tuple[tuple[str, float], ...]
    traces: tuple[tuple[str, float], ...]

    def to_payload(self) -> dict:
        return {
            "topic": self.topic_id,
            "top_words": [[t, w] for t, w in self.top_words],
            "classes": [[c, w] for c, w in self.classes],
            "methods": [[m, w] for m, w in self.methods],
            "traces": [[d, w] for d, w in self.traces],
        }


def drill_down(
    topic_id: int, index: QueryIndex, top_n: int | None = None
) -> DrillDown:
    """Classes, methods, and traces ranked by their topic weight."""
    if topic_id not in index.topic_traces:
        raise QueryError(f"topic {topic_id} not found")
    classes = index.topic_classes[topic_id]
    methods = index.topic_methods[topic_id]
    traces = index.topic_traces[topic_id]
    if top_n is not None:
        classes = classes[:top_n]
        methods = methods[:top_n]
        traces = traces[:top_n]
    return DrillDown(
        topic_id=topic_id,
        top_words=index.topic_top_words[topic_id],
        classes=classes,
        methods=methods,
        traces=traces,
    )


def format_result_text(result: QueryResult) -> str:
    """Aligned-column rendering for the CLI."""
    lines = [f"query: {result.query}", f"terms: {' '.join(result.terms)}"]
    if result.notice:
        lines.append(f"notice: {result.notice}")
    if result.topics:
        lines.append(f"{'topic':>6}  {'score':>12}  top words")
        for hit in result.topics:
            words = " ".join(t for t, _ in hit.top_words)
            lines.append(f"{hit.topic_id:>6}  {hit.score:>12.6f}  {words}")
    return "\n".join(lines) + "\n"


def format_drill_down_text(dd: DrillDown) -> str:
    lines = [f"topic {dd.topic_id}: " + " ".join(t for t, _ in dd.top_words)]
    for label, posts in (
        ("classes", dd.classes),
        ("methods", dd.methods),
        ("traces", dd.traces),
    ):
        lines.append(f"{label}:")
        for name, w in posts:
            lines.append(f"  {name:<40} {w:.6f}")
    return "\n".join(lines) + "\n"
