"""Omnipresent-method detection: TF-IDF-style scoring over traces.

Traces play the role of documents and method invocations the role of terms:
``tf_ij`` is the fraction of trace i's invocations spent in method j,
``idf_j = log10(D / D_j)`` where D_j counts the traces invoking j, and
``score(m_j) = sum_i tf_ij * idf_j``. A method invoked by every trace has
idf 0 and therefore score 0, no matter how often it runs.

Raw (pre-compression) counts feed the tf term; the binary trace-method
factor used by the matrix stage is a separate artifact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .errors import FilterError, ScoringError
from .traces import CorpusCounts


@dataclass(frozen=True)
class MethodScoreTable:
    trace_ids: tuple[str, ...]
    methods: tuple[str, ...]  # sorted lexicographically
    tf: Mapping[str, Mapping[str, float]]  # trace_id -> method -> tf
    cells: Mapping[str, Mapping[str, float]]  # trace_id -> method -> tf*idf
    idf: Mapping[str, float]
    scores: Mapping[str, float]
    threshold: float | None = None
    kept: frozenset[str] | None = None

    def ranked(self) -> list[str]:
        """Methods by descending score, ties broken lexicographically."""
        return sorted(self.methods, key=lambda m: (-self.scores[m], m))


def score_methods(counts: CorpusCounts) -> MethodScoreTable:
    """Score every method in the corpus; deterministic, order-independent."""
    if counts.num_traces < 1:
        raise ScoringError("scoring requires at least one trace")
    totals = {}
    for trace_id, per_method in zip(counts.trace_ids, counts.per_trace):
        total = sum(per_method.values())
        if total == 0:
            raise ScoringError(f"trace {trace_id} has no method invocations")
        totals[trace_id] = total

    methods = tuple(counts.methods)
    d = counts.num_traces
    idf = {m: math.log10(d / counts.d_j[m]) for m in methods}

    tf: dict[str, dict[str, float]] = {}
    cells: dict[str, dict[str, float]] = {}
    scores = dict.fromkeys(methods, 0.0)
    for trace_id, per_method in zip(counts.trace_ids, counts.per_trace):
        row_tf = {}
        row_cells = {}
        for m, c in per_method.items():
            row_tf[m] = c / totals[trace_id]
            row_cells[m] = row_tf[m] * idf[m]
            scores[m] += row_cells[m]
        tf[trace_id] = row_tf
        cells[trace_id] = row_cells

    return MethodScoreTable(
        trace_ids=counts.trace_ids,
        methods=methods,
        tf=tf,
        cells=cells,
        idf=idf,
        scores=scores,
    )


def filter_methods(
    table: MethodScoreTable, threshold: float
) -> tuple[MethodScoreTable, frozenset[str], frozenset[str]]:
    """Partition methods into kept (score >= threshold) and removed.

    Returns the table annotated with the threshold, the kept set M_t, and
    the removed set. An empty kept set is a hard error: downstream stages
    would have nothing to analyze.
    """
    if threshold < 0:
        raise FilterError(f"threshold must be >= 0, got {threshold}")
    kept = frozenset(m for m in table.methods if table.scores[m] >= threshold)
    removed = frozenset(table.methods) - kept
    if not kept:
        max_score = max(table.scores.values(), default=0.0)
        raise FilterError(
            f"threshold {threshold} removes every method "
            f"(maximal score is {max_score}); nothing left to analyze"
        )
    annotated = MethodScoreTable(
        trace_ids=table.trace_ids,
        methods=table.methods,
        tf=table.tf,
        cells=table.cells,
        idf=table.idf,
        scores=table.scores,
        threshold=threshold,
        kept=kept,
    )
    return annotated, kept, removed


def score_report(table: MethodScoreTable) -> str:
    """Delimited score table, byte-stable.

    One row per method ordered by descending score then MethodKey; columns
    are the per-trace tf*idf cells, the total score, and the kept flag
    (blank when no threshold was applied).
    """
    cols = "\t".join(f"cell:{t}" for t in table.trace_ids)
    lines = [f"method\t{cols}\tscore\tkept"]
    for m in table.ranked():
        cells = "\t".join(repr(table.cells[t].get(m, 0.0)) for t in table.trace_ids)
        if table.kept is None:
            kept = ""
        else:
            kept = "1" if m in table.kept else "0"
        lines.append(f"{m}\t{cells}\t{repr(table.scores[m])}\t{kept}")
    return "\n".join(lines) + "\n"
