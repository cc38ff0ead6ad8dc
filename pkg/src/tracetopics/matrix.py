"""Trace-by-identifier matrix construction.

Two factors are built over the kept methods: a binary trace-method matrix
(presence after compression) and a method-identifier count matrix (terms
tokenized from each method's facts). Their product is the document-term
corpus handed to the topic model. Multiplicities are kept throughout;
binarization applies only to the trace-method factor.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import MatrixError
from .facts import ClassFact, FactsStore, MethodFact
from .tokenizer import Tokenizer, DEFAULT_TOKENIZER
from .traces import Trace

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TermDictionary:
    """Dense bidirectional term <-> id map.

    Ids are assigned lexicographically, so they depend only on the term
    set — re-serializing or reordering documents never changes them.
    """

    terms: tuple[str, ...]

    @classmethod
    def from_terms(cls, terms: Iterable[str]) -> "TermDictionary":
        return cls(tuple(sorted(set(terms))))

    @property
    def size(self) -> int:
        return len(self.terms)

    def id_of(self, term: str) -> int | None:
        idx = self._index().get(term)
        return idx

    def _index(self) -> dict[str, int]:
        cached = getattr(self, "_idx", None)
        if cached is None:
            cached = {t: i for i, t in enumerate(self.terms)}
            object.__setattr__(self, "_idx", cached)
        return cached

    def __contains__(self, term: str) -> bool:
        return term in self._index()


def method_term_vector(
    method: MethodFact,
    owner: ClassFact,
    tokenizer: Tokenizer = DEFAULT_TOKENIZER,
    include_class_context: bool = False,
) -> Counter:
    """Term counts for one method: name, arguments, return type/value,
    comment words, and the owning class name.

    include_class_context additionally folds in the class-level facts
    (variables, inherits-from, implements-to).
    """
    sources = [method.method_name, owner.class_name, method.return_type]
    sources.extend(method.arguments)
    if method.return_value:
        sources.append(method.return_value)
    sources.extend(method.comment_terms)
    if include_class_context:
        sources.extend(owner.variables)
        if owner.inherits_from:
            sources.append(owner.inherits_from)
        sources.extend(owner.implements_to)
    counts: Counter = Counter()
    for raw in sources:
        counts.update(tokenizer.tokenize(raw))
    return counts


@dataclass(frozen=True)
class TraceIdentifierMatrix:
    """The LDA corpus plus both factor matrices.

    rows[i] maps term id -> count for trace_ids[i]; methods lists the kept,
    resolvable methods (sorted); trace_method[i][j] is 1 iff methods[j]
    occurs in trace i after compression; method_terms[j] is methods[j]'s
    term-count vector over dictionary ids.
    """

    trace_ids: tuple[str, ...]
    dictionary: TermDictionary
    rows: tuple[Mapping[int, int], ...]
    methods: tuple[str, ...]
    trace_method: tuple[tuple[int, ...], ...]
    method_terms: tuple[Mapping[int, int], ...]
    skipped_methods: tuple[str, ...] = ()

    @property
    def num_docs(self) -> int:
        return len(self.trace_ids)

    @property
    def vocab_size(self) -> int:
        return self.dictionary.size

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.num_docs, self.vocab_size), dtype=np.int64)
        for i, row in enumerate(self.rows):
            for v, c in row.items():
                out[i, v] = c
        return out

    def trace_method_dense(self) -> np.ndarray:
        return np.array(self.trace_method, dtype=np.int64).reshape(
            self.num_docs, len(self.methods)
        )

    def method_terms_dense(self) -> np.ndarray:
        out = np.zeros((len(self.methods), self.vocab_size), dtype=np.int64)
        for j, vec in enumerate(self.method_terms):
            for v, c in vec.items():
                out[j, v] = c
        return out


def build_matrix(
    corpus: Sequence[Trace],
    kept: Iterable[str],
    store: FactsStore,
    tokenizer: Tokenizer = DEFAULT_TOKENIZER,
    include_class_context: bool = False,
) -> TraceIdentifierMatrix:
    """Multiply the binary trace-method factor by the method-identifier
    counts.

    Kept methods missing from the facts store are skipped with a warning;
    an all-zero document row or an empty vocabulary is an error because the
    topic model cannot digest either.
    """
    kept = set(kept)
    if not kept:
        raise MatrixError("kept method set is empty")

    resolved = sorted(k for k in kept if k in store.methods)
    skipped = tuple(sorted(kept - set(resolved)))
    if skipped:
        log.warning(
            "%d kept method(s) missing from facts store, skipped: %s",
            len(skipped),
            ", ".join(skipped),
        )
    if not resolved:
        raise MatrixError("no kept method is resolvable in the facts store")

    raw_vectors = {}
    for key in resolved:
        m = store.methods[key]
        owner = store.classes[m.class_name]
        raw_vectors[key] = method_term_vector(
            m, owner, tokenizer, include_class_context
        )

    dictionary = TermDictionary.from_terms(
        t for vec in raw_vectors.values() for t in vec
    )
    if dictionary.size == 0:
        raise MatrixError("vocabulary is empty after tokenization")
    index = {t: i for i, t in enumerate(dictionary.terms)}
    method_terms = tuple(
        {index[t]: c for t, c in sorted(raw_vectors[key].items())} for key in resolved
    )

    trace_method = []
    rows = []
    for trace in corpus:
        present = {e.key for e in trace.method_entries()}
        bits = tuple(1 if key in present else 0 for key in resolved)
        acc: Counter = Counter()
        for j, bit in enumerate(bits):
            if bit:
                acc.update(method_terms[j])
        if not acc:
            raise MatrixError(
                f"trace {trace.trace_id} has no surviving terms (all-zero row)"
            )
        trace_method.append(bits)
        rows.append(dict(acc))

    return TraceIdentifierMatrix(
        trace_ids=tuple(t.trace_id for t in corpus),
        dictionary=dictionary,
        rows=tuple(rows),
        methods=tuple(resolved),
        trace_method=tuple(trace_method),
        method_terms=method_terms,
        skipped_methods=skipped,
    )


def export_matrix(matrix: TraceIdentifierMatrix) -> str:
    """Corpus export: first line is the number of traces, then one line per
    trace listing term:count pairs (terms in dictionary order)."""
    lines = [str(matrix.num_docs)]
    for row in matrix.rows:
        pairs = " ".join(
            f"{matrix.dictionary.terms[v]}:{row[v]}" for v in sorted(row)
        )
        lines.append(pairs)
    return "\n".join(lines) + "\n"


def export_vocabulary(matrix: TraceIdentifierMatrix) -> str:
    """One term per line, line number = term id."""
    return "\n".join(matrix.dictionary.terms) + "\n"


def export_method_terms(matrix: TraceIdentifierMatrix) -> str:
    """Method-identifier factor: method_key<TAB>term:count pairs."""
    lines = []
    for key, vec in zip(matrix.methods, matrix.method_terms):
        pairs = " ".join(
            f"{matrix.dictionary.terms[v]}:{vec[v]}" for v in sorted(vec)
        )
        lines.append(f"{key}\t{pairs}")
    return "\n".join(lines) + "\n"


def export_trace_method(matrix: TraceIdentifierMatrix) -> str:
    """Binary trace-method factor with header row of method keys."""
    lines = ["trace\t" + "\t".join(matrix.methods)]
    for trace_id, bits in zip(matrix.trace_ids, matrix.trace_method):
        lines.append(trace_id + "\t" + "\t".join(str(b) for b in bits))
    return "\n".join(lines) + "\n"


def parse_method_terms(text: str) -> tuple[tuple[str, ...], tuple[dict[str, int], ...]]:
    """Read the method-identifier factor back (term strings as keys)."""
    methods = []
    vectors = []
    for line in text.splitlines():
        if not line.strip():
            continue
        key, _, pairs = line.partition("\t")
        vec: dict[str, int] = {}
        for pair in pairs.split():
            term, _, count = pair.rpartition(":")
            if not term:
                raise MatrixError(f"malformed term:count pair {pair!r}")
            vec[term] = int(count)
        methods.append(key)
        vectors.append(vec)
    return tuple(methods), tuple(vectors)


def parse_trace_method(text: str) -> tuple[tuple[str, ...], tuple[str, ...], tuple[tuple[int, ...], ...]]:
    """Read the binary factor back: (trace ids, method keys, bit rows)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise MatrixError("empty trace-method factor file")
    methods = tuple(lines[0].split("\t")[1:])
    trace_ids = []
    bits = []
    for line in lines[1:]:
        parts = line.split("\t")
        trace_ids.append(parts[0])
        bits.append(tuple(int(b) for b in parts[1:]))
    return tuple(trace_ids), methods, tuple(bits)


def parse_matrix_export(
    text: str, trace_ids: Sequence[str] | None = None
) -> tuple[tuple[dict[str, int], ...], TermDictionary]:
    """Read a matrix export back: per-trace term->count maps plus the
    dictionary rebuilt over the file's terms (ids identical to the
    original because assignment is lexicographic)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise MatrixError("empty matrix file")
    declared = int(lines[0])
    body = lines[1:]
    if len(body) != declared:
        raise MatrixError(
            f"matrix header declares {declared} traces but file has {len(body)}"
        )
    rows = []
    terms = set()
    for line in body:
        row: dict[str, int] = {}
        for pair in line.split():
            term, _, count = pair.rpartition(":")
            if not term:
                raise MatrixError(f"malformed term:count pair {pair!r}")
            row[term] = int(count)
            terms.add(term)
        rows.append(row)
    return tuple(rows), TermDictionary.from_terms(terms)
