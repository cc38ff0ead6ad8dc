"""Post-model analytics.

Topics are grouped into categories by cosine similarity over their term
distributions; classes get probability-like topic weights by aggregating
phi over each class's term counts; classes are clustered by a fuzzy
max-min transitive closure cut at lambda. Heat-map and report exports
feed the CLI artifacts and the read-only service.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import AnalysisError
from .facts import FactsStore
from .lda import TopicModel

log = logging.getLogger(__name__)

CTM_FORMULA = (
    "weight(c,k) = sum_v phi[k,v] * termcount[c,v]; "
    "rows normalized by sum over topics"
)


def cosine(u: Sequence[float], v: Sequence[float]) -> float:
    """Cosine similarity of two non-negative vectors."""
    a = np.asarray(u, dtype=np.float64)
    b = np.asarray(v, dtype=np.float64)
    if a.shape != b.shape:
        raise AnalysisError("cosine inputs have different lengths")
    na = math.sqrt(float(a @ a))
    nb = math.sqrt(float(b @ b))
    if na == 0.0 or nb == 0.0:
        raise AnalysisError("cosine of a zero vector is undefined")
    return float(a @ b) / (na * nb)


@dataclass(frozen=True)
class Category:
    category_id: str
    topics: tuple[int, ...]


@dataclass(frozen=True)
class CategorySet:
    """Topic groups above the similarity threshold.

    categories hold the maximal single-link groups (two or more members);
    topics without any above-threshold neighbor land in rest. membership
    maps each topic to the categories that one of its above-threshold
    pairs seeded.
    """

    threshold: float
    categories: tuple[Category, ...]
    rest: tuple[int, ...]
    membership: Mapping[int, tuple[str, ...]]


def group_topics(phi: np.ndarray, threshold: float) -> CategorySet:
    """Single-link chaining over topic pairs with cosine > threshold."""
    if not 0.0 < threshold <= 1.0:
        raise AnalysisError("category threshold must be in (0, 1]")
    K = phi.shape[0]
    parent = list(range(K))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges = []
    for i in range(K):
        for j in range(i + 1, K):
            if cosine(phi[i], phi[j]) > threshold:
                edges.append((i, j))
                parent[find(i)] = find(j)

    groups: dict[int, list[int]] = {}
    for k in range(K):
        groups.setdefault(find(k), []).append(k)
    members = sorted(
        (sorted(g) for g in groups.values() if len(g) >= 2), key=lambda g: g[0]
    )
    categories = tuple(
        Category(f"cat_{i}", tuple(g)) for i, g in enumerate(members)
    )
    in_category = {t for c in categories for t in c.topics}
    rest = tuple(k for k in range(K) if k not in in_category)

    by_topic: dict[int, set[str]] = {k: set() for k in range(K)}
    cat_of = {t: c.category_id for c in categories for t in c.topics}
    for i, j in edges:
        by_topic[i].add(cat_of[i])
        by_topic[j].add(cat_of[j])
    membership = {k: tuple(sorted(by_topic[k])) for k in range(K)}
    return CategorySet(threshold, categories, rest, membership)


@dataclass(frozen=True)
class ClassTopicMatrix:
    """Row-normalized class-topic weights plus the aggregation formula."""

    class_names: tuple[str, ...]
    topic_ids: tuple[int, ...]
    weights: np.ndarray
    formula: str = CTM_FORMULA
    excluded: tuple[str, ...] = ()

    def row(self, class_name: str) -> np.ndarray:
        return self.weights[self.class_names.index(class_name)]


def class_term_counts(
    store: FactsStore,
    methods: Sequence[str],
    method_terms: Sequence[Mapping[int, int]],
    vocab_size: int,
) -> tuple[tuple[str, ...], np.ndarray]:
    """Aggregate the method-identifier factor per owning class."""
    by_class: dict[str, np.ndarray] = {}
    for key, vec in zip(methods, method_terms):
        cls = store.methods[key].class_name
        row = by_class.setdefault(cls, np.zeros(vocab_size, dtype=np.int64))
        for v, c in vec.items():
            row[v] += c
    names = tuple(sorted(by_class))
    counts = np.array([by_class[n] for n in names], dtype=np.int64).reshape(
        len(names), vocab_size
    )
    return names, counts


def class_topic_matrix(
    model: TopicModel,
    store: FactsStore,
    methods: Sequence[str],
    method_terms: Sequence[Mapping[int, int]],
) -> ClassTopicMatrix:
    """weight(c,k) = sum_v phi[k,v] * termcount[c,v], rows normalized."""
    names, counts = class_term_counts(
        store, methods, method_terms, model.vocab_size
    )
    raw = counts @ model.phi.T
    sums = raw.sum(axis=1)
    keep = sums > 0
    dropped = tuple(n for n, ok in zip(names, keep) if not ok)
    if dropped:
        log.warning(
            "excluded %d class(es) with zero terms: %s",
            len(dropped),
            ", ".join(dropped),
        )
    if not keep.any():
        raise AnalysisError("no class has any surviving terms")
    weights = raw[keep] / sums[keep, None]
    kept_names = tuple(n for n, ok in zip(names, keep) if ok)
    return ClassTopicMatrix(
        class_names=kept_names,
        topic_ids=tuple(range(model.num_topics)),
        weights=weights,
        excluded=dropped,
    )


def class_similarity(ctm: ClassTopicMatrix) -> np.ndarray:
    """Pairwise cosine over class rows, diagonal 1."""
    n = len(ctm.class_names)
    R = np.eye(n, dtype=np.float64)
    for i in range(n):
        for j in range(i + 1, n):
            R[i, j] = R[j, i] = cosine(ctm.weights[i], ctm.weights[j])
    return R


def maxmin_closure(R: np.ndarray) -> np.ndarray:
    """Max-min transitive closure by repeated squaring to a fixed point."""
    if R.shape[0] != R.shape[1]:
        raise AnalysisError("closure input must be square")
    cur = R.astype(np.float64, copy=True)
    while True:
        # (R o R)[i,j] = max_k min(R[i,k], R[k,j])
        squared = np.minimum(cur[:, :, None], cur[None, :, :]).max(axis=1)
        nxt = np.maximum(cur, squared)
        if np.array_equal(nxt, cur):
            return cur
        cur = nxt


@dataclass(frozen=True)
class ClusterPartition:
    cut: float
    clusters: tuple[tuple[str, ...], ...]

    def cluster_of(self, class_name: str) -> tuple[str, ...]:
        for group in self.clusters:
            if class_name in group:
                return group
        raise AnalysisError(f"unknown class {class_name}")


def lambda_cut(
    closure: np.ndarray, class_names: Sequence[str], cut: float
) -> ClusterPartition:
    """Connected components of {(i,j) : closure[i,j] >= cut}."""
    if not 0.0 <= cut <= 1.0:
        raise AnalysisError("lambda must be in [0, 1]")
    n = len(class_names)
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(n):
        for j in range(i + 1, n):
            if closure[i, j] >= cut:
                parent[find(i)] = find(j)
    groups: dict[int, list[str]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(class_names[i])
    clusters = tuple(
        tuple(sorted(g)) for g in sorted(groups.values(), key=lambda g: sorted(g)[0])
    )
    return ClusterPartition(cut, clusters)


def lambda_cut_clusters(ctm: ClassTopicMatrix, cut: float) -> ClusterPartition:
    """Similarity, closure, and cut in one step."""
    return lambda_cut(maxmin_closure(class_similarity(ctm)), ctm.class_names, cut)


def f_measure(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall; 0 when either is 0."""
    if not (0.0 <= precision <= 1.0 and 0.0 <= recall <= 1.0):
        raise AnalysisError("precision and recall must be in [0, 1]")
    if precision == 0.0 and recall == 0.0:
        log.warning("f_measure(0, 0) is undefined; returning 0")
        return 0.0
    if precision == 0.0 or recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def heatmap_grid(
    ctm: ClassTopicMatrix, per_row: bool = False
) -> list[tuple[str, int, float, float]]:
    """(class, topic, weight, shade) records; shade normalized to the
    global max by default, to each row's max with per_row."""
    if ctm.weights.size == 0:
        raise AnalysisError("empty class-topic matrix")
    grid = []
    global_max = float(ctm.weights.max())
    for i, name in enumerate(ctm.class_names):
        denom = float(ctm.weights[i].max()) if per_row else global_max
        for k in ctm.topic_ids:
            w = float(ctm.weights[i, k])
            shade = w / denom if denom > 0 else 0.0
            grid.append((name, k, w, shade))
    return grid


def export_heatmap(ctm: ClassTopicMatrix, per_row: bool = False) -> str:
    lines = ["class\ttopic\tweight\tshade"]
    for name, k, w, shade in heatmap_grid(ctm, per_row):
        lines.append(f"{name}\t{k}\t{w!r}\t{shade!r}")
    return "\n".join(lines) + "\n"


def export_ctm(ctm: ClassTopicMatrix) -> str:
    lines = [f"# formula: {ctm.formula}"]
    if ctm.excluded:
        lines.append("# excluded: " + " ".join(ctm.excluded))
    lines.append("class\t" + "\t".join(f"topic_{k}" for k in ctm.topic_ids))
    for i, name in enumerate(ctm.class_names):
        vals = "\t".join(repr(float(x)) for x in ctm.weights[i])
        lines.append(f"{name}\t{vals}")
    return "\n".join(lines) + "\n"


def parse_ctm(text: str) -> ClassTopicMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    formula = CTM_FORMULA
    excluded: tuple[str, ...] = ()
    while lines and lines[0].startswith("#"):
        head = lines.pop(0)
        if head.startswith("# formula: "):
            formula = head[len("# formula: "):]
        elif head.startswith("# excluded: "):
            excluded = tuple(head[len("# excluded: "):].split())
    if not lines:
        raise AnalysisError("empty class-topic matrix file")
    topic_ids = tuple(
        int(col.removeprefix("topic_")) for col in lines[0].split("\t")[1:]
    )
    names = []
    rows = []
    for line in lines[1:]:
        parts = line.split("\t")
        names.append(parts[0])
        rows.append([float(x) for x in parts[1:]])
    return ClassTopicMatrix(
        class_names=tuple(names),
        topic_ids=topic_ids,
        weights=np.array(rows, dtype=np.float64),
        formula=formula,
        excluded=excluded,
    )


def export_closure(closure: np.ndarray, class_names: Sequence[str]) -> str:
    lines = ["class\t" + "\t".join(class_names)]
    for i, name in enumerate(class_names):
        vals = "\t".join(repr(float(x)) for x in closure[i])
        lines.append(f"{name}\t{vals}")
    return "\n".join(lines) + "\n"


def parse_closure(text: str) -> tuple[tuple[str, ...], np.ndarray]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    names = tuple(lines[0].split("\t")[1:])
    rows = [[float(x) for x in line.split("\t")[1:]] for line in lines[1:]]
    return names, np.array(rows, dtype=np.float64)


def export_categories(cats: CategorySet) -> str:
    lines = [f"# threshold: {cats.threshold!r}"]
    lines.append("category\ttopics")
    for c in cats.categories:
        lines.append(c.category_id + "\t" + " ".join(str(t) for t in c.topics))
    lines.append("rest\t" + " ".join(str(t) for t in cats.rest))
    return "\n".join(lines) + "\n"


def export_clusters(part: ClusterPartition) -> str:
    lines = [f"# lambda: {part.cut!r}"]
    lines.append("cluster\tclasses")
    for i, group in enumerate(part.clusters):
        lines.append(f"cluster_{i}\t" + " ".join(group))
    return "\n".join(lines) + "\n"


def categories_payload(cats: CategorySet) -> dict:
    return {
        "threshold": cats.threshold,
        "categories": [
            {"id": c.category_id, "topics": list(c.topics)} for c in cats.categories
        ],
        "rest": list(cats.rest),
        "membership": {str(k): list(v) for k, v in sorted(cats.membership.items())},
    }


def clusters_payload(part: ClusterPartition) -> dict:
    return {
        "lambda": part.cut,
        "clusters": [list(group) for group in part.clusters],
    }


def heatmap_payload(ctm: ClassTopicMatrix, per_row: bool = False) -> dict:
    return {
        "normalization": "per_row" if per_row else "global_max",
        "formula": ctm.formula,
        "topics": list(ctm.topic_ids),
        "cells": [
            {"class": name, "topic": k, "weight": w, "shade": shade}
            for name, k, w, shade in heatmap_grid(ctm, per_row)
        ],
    }


def write_analysis_json(path, cats: CategorySet, part: ClusterPartition, ctm: ClassTopicMatrix) -> None:
    payload = {
        "categories": categories_payload(cats),
        "clusters": clusters_payload(part),
        "heatmap": heatmap_payload(ctm),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
