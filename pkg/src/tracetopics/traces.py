"""Execution-trace ingestion, validation, compression, and corpus statistics.

Trace file format (text, one event per line, space-separated):

    M <thread> <class>.<method><signature>   method entry
    START                                    marker: begin marked region
    STOP                                     marker: end marked region
    # ...                                    comment, ignored

The corpus manifest is a tab-separated file with one record per trace:
``trace_id<TAB>use_case_id<TAB>path``.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import TraceParseError, TraceStructureError, ScoringError

log = logging.getLogger(__name__)

METHOD_ENTRY = "method_entry"
MARKER_START = "marker_start"
MARKER_STOP = "marker_stop"


def method_key(class_name: str, method_name: str, signature: str = "") -> str:
    """Qualified method key: the three parts must match byte-for-byte."""
    return f"{class_name}.{method_name}{signature}"


def split_method_key(key: str) -> tuple[str, str, str]:
    """Inverse of method_key; the method part itself contains no dots."""
    paren = key.find("(")
    qualified, signature = (key, "") if paren < 0 else (key[:paren], key[paren:])
    if "." not in qualified:
        raise ValueError(f"method key without class qualifier: {key!r}")
    class_name, name = qualified.rsplit(".", 1)
    return class_name, name, signature


@dataclass(frozen=True)
class TraceEvent:
    thread_id: str
    kind: str  # METHOD_ENTRY | MARKER_START | MARKER_STOP
    class_name: str
    method_name: str
    signature: str
    seq: int

    @property
    def key(self) -> str:
        return method_key(self.class_name, self.method_name, self.signature)


@dataclass(frozen=True)
class Trace:
    """One scenario execution. Immutable; safe to share between threads."""

    trace_id: str
    use_case_id: str
    events: tuple[TraceEvent, ...]
    marked_only: bool = False
    warnings: tuple[str, ...] = ()

    def method_entries(self) -> list[TraceEvent]:
        return [e for e in self.events if e.kind == METHOD_ENTRY]

    def method_counts(self) -> Counter:
        """Raw invocation count per MethodKey."""
        return Counter(e.key for e in self.method_entries())

    def __post_init__(self):
        seqs = [e.seq for e in self.events]
        if any(b <= a for a, b in zip(seqs, seqs[1:])):
            raise TraceStructureError(
                f"trace {self.trace_id}: seq values must strictly increase"
            )


def _parse_event_line(path: str, line_no: int, line: str, seq: int) -> TraceEvent:
    parts = line.split()
    if parts[0] == "START":
        if len(parts) != 1:
            raise TraceParseError(path, line_no, f"malformed marker line: {line!r}")
        return TraceEvent("", MARKER_START, "", "", "", seq)
    if parts[0] == "STOP":
        if len(parts) != 1:
            raise TraceParseError(path, line_no, f"malformed marker line: {line!r}")
        return TraceEvent("", MARKER_STOP, "", "", "", seq)
    if parts[0] != "M" or len(parts) != 3:
        raise TraceParseError(path, line_no, f"unrecognized event line: {line!r}")
    thread_id, target = parts[1], parts[2]
    try:
        class_name, name, signature = split_method_key(target)
    except ValueError as exc:
        raise TraceParseError(path, line_no, str(exc)) from None
    if not class_name or not name:
        raise TraceParseError(path, line_no, f"empty class or method name: {target!r}")
    return TraceEvent(thread_id, METHOD_ENTRY, class_name, name, signature, seq)


def parse_trace_file(
    path: str | Path, trace_id: str, use_case_id: str, marked_only: bool = False
) -> Trace:
    """Parse one trace file; see module docstring for the line format.

    With marked_only, method entries outside a START/STOP pair are dropped.
    A START inside an open region restarts it (the open region's events are
    discarded with a warning), and a region left open at end of file is
    discarded the same way; a STOP without an open region is a structural
    error. Retained events are renumbered to contiguous seq values so that
    serialization round-trips.
    """
    path = Path(path)
    raw_events: list[TraceEvent] = []
    seq = 0
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        raw_events.append(_parse_event_line(str(path), line_no, stripped, seq))
        seq += 1

    warnings: list[str] = []
    kept: list[TraceEvent] = []
    in_region = False
    region: list[TraceEvent] = []
    for event in raw_events:
        if event.kind == MARKER_START:
            if in_region:
                # restart: the open region lost its STOP, so its buffered
                # events never count as marked
                warnings.append(
                    f"marker_start inside open region: region restarted, "
                    f"{len(region)} event(s) unmarked"
                )
                if not marked_only:
                    kept.extend(region)
                region = []
            in_region = True
            kept.append(event)
        elif event.kind == MARKER_STOP:
            if not in_region:
                raise TraceStructureError(
                    f"{path}: marker_stop without matching marker_start"
                )
            kept.extend(region)
            region = []
            in_region = False
            kept.append(event)
        else:
            if in_region:
                region.append(event)
            elif not marked_only:
                kept.append(event)
    if in_region:
        warnings.append(
            f"unterminated marked region: {len(region)} event(s) unmarked"
        )
        if not marked_only:
            kept.extend(region)

    kept.sort(key=lambda e: e.seq)
    if not raw_events:
        warnings.append("empty trace file")

    renumbered = tuple(replace(e, seq=i) for i, e in enumerate(kept))
    if warnings:
        log.warning("%s: %s", path, "; ".join(warnings))
    return Trace(trace_id, use_case_id, renumbered, marked_only, tuple(warnings))


def serialize_trace(trace: Trace) -> str:
    """Render a Trace back to the trace file format (round-trip safe)."""
    lines = []
    for e in trace.events:
        if e.kind == MARKER_START:
            lines.append("START")
        elif e.kind == MARKER_STOP:
            lines.append("STOP")
        else:
            lines.append(f"M {e.thread_id} {e.key}")
    return "\n".join(lines) + ("\n" if lines else "")


@dataclass(frozen=True)
class ManifestEntry:
    trace_id: str
    use_case_id: str
    path: str


def read_manifest(path: str | Path) -> list[ManifestEntry]:
    """Read the corpus manifest; paths are resolved relative to the manifest."""
    path = Path(path)
    entries = []
    seen = set()
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split("\t")
        if len(fields) != 3:
            raise TraceParseError(
                str(path), line_no, f"manifest record needs 3 tab-separated fields: {line!r}"
            )
        trace_id, use_case_id, trace_path = fields
        if trace_id in seen:
            raise TraceStructureError(f"duplicate trace_id in manifest: {trace_id}")
        seen.add(trace_id)
        resolved = Path(trace_path)
        if not resolved.is_absolute():
            resolved = path.parent / resolved
        entries.append(ManifestEntry(trace_id, use_case_id, str(resolved)))
    return entries


def write_manifest(entries: Sequence[ManifestEntry], path: str | Path) -> None:
    lines = [f"{e.trace_id}\t{e.use_case_id}\t{e.path}" for e in entries]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def ingest_traces(
    paths: Sequence[str | Path],
    marked_only: bool = False,
    trace_ids: Sequence[str] | None = None,
    use_case_ids: Sequence[str] | None = None,
) -> list[Trace]:
    """Ingest one Trace per file, preserving event order.

    trace_ids default to file stems and use_case_ids to the trace_id; both
    are normally supplied from the corpus manifest.
    """
    if trace_ids is None:
        trace_ids = [Path(p).stem for p in paths]
    if use_case_ids is None:
        use_case_ids = list(trace_ids)
    if not (len(paths) == len(trace_ids) == len(use_case_ids)):
        raise ValueError("paths, trace_ids and use_case_ids must align")
    if len(set(trace_ids)) != len(trace_ids):
        raise TraceStructureError("trace_id values must be unique across the corpus")
    return [
        parse_trace_file(p, tid, uid, marked_only)
        for p, tid, uid in zip(paths, trace_ids, use_case_ids)
    ]


def ingest_manifest(path: str | Path, marked_only: bool = False) -> list[Trace]:
    entries = read_manifest(path)
    return ingest_traces(
        [e.path for e in entries],
        marked_only,
        [e.trace_id for e in entries],
        [e.use_case_id for e in entries],
    )


def compress_trace(trace: Trace) -> Trace:
    """Keep only the first occurrence of each MethodKey.

    Marker events pass through untouched; relative order of first
    occurrences is preserved. Idempotent.
    """
    seen: set[str] = set()
    kept = []
    for e in trace.events:
        if e.kind != METHOD_ENTRY:
            kept.append(e)
            continue
        if e.key in seen:
            continue
        seen.add(e.key)
        kept.append(e)
    renumbered = tuple(replace(e, seq=i) for i, e in enumerate(kept))
    return replace(trace, events=renumbered)


@dataclass(frozen=True)
class CorpusCounts:
    """Raw per-trace invocation counts plus document frequencies.

    D is the number of traces; d_j maps each MethodKey to the number of
    traces that invoke it (1 <= d_j <= D for every present method).
    """

    trace_ids: tuple[str, ...]
    per_trace: tuple[Mapping[str, int], ...]
    d_j: Mapping[str, int]

    @property
    def num_traces(self) -> int:
        return len(self.trace_ids)

    @property
    def methods(self) -> list[str]:
        return sorted(self.d_j)


def corpus_counts(traces: Sequence[Trace]) -> CorpusCounts:
    """Tally raw (pre-compression) invocation counts across the corpus."""
    per_trace = [t.method_counts() for t in traces]
    d_j: Counter = Counter()
    for counts in per_trace:
        d_j.update(counts.keys())
    return CorpusCounts(
        trace_ids=tuple(t.trace_id for t in traces),
        per_trace=tuple(dict(c) for c in per_trace),
        d_j=dict(d_j),
    )


@dataclass(frozen=True)
class UseCaseStats:
    use_case_id: str
    scenarios: int
    methods: int  # method_entry events across the use case's traces
    distinct_methods: int
    methods_after_filter: int | None = None


def corpus_stats(
    corpus: Sequence[Trace], kept: Iterable[str] | None = None
) -> list[UseCaseStats]:
    """Per-use-case scenario/method tallies, ordered by use_case_id.

    With a kept-method set the after-filter column counts the method
    entries whose key survived filtering.
    """
    if not corpus:
        raise ScoringError("corpus_stats: empty corpus")
    kept_set = set(kept) if kept is not None else None
    by_case: dict[str, list[Trace]] = {}
    for t in corpus:
        by_case.setdefault(t.use_case_id, []).append(t)
    rows = []
    for use_case_id in sorted(by_case):
        traces = by_case[use_case_id]
        entries = [e for t in traces for e in t.method_entries()]
        after = (
            sum(1 for e in entries if e.key in kept_set)
            if kept_set is not None
            else None
        )
        rows.append(
            UseCaseStats(
                use_case_id=use_case_id,
                scenarios=len(traces),
                methods=len(entries),
                distinct_methods=len({e.key for e in entries}),
                methods_after_filter=after,
            )
        )
    return rows


def stats_table(rows: Sequence[UseCaseStats]) -> str:
    """Delimited export of corpus stats (chart-ready)."""
    header = "use_case\tscenarios\tmethods\tdistinct_methods\tmethods_after_filter"
    lines = [header]
    for r in rows:
        after = "" if r.methods_after_filter is None else str(r.methods_after_filter)
        lines.append(
            f"{r.use_case_id}\t{r.scenarios}\t{r.methods}\t{r.distinct_methods}\t{after}"
        )
    return "\n".join(lines) + "\n"
