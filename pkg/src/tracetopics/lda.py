"""Latent Dirichlet allocation by collapsed Gibbs sampling.

Documents are the matrix rows (traces), words are identifier terms. Each
token's topic is resampled from p(z=k | rest) which is proportional to
(n_dk + alpha) * (n_kv + beta) / (n_k + V*beta); theta and phi are point
estimates from the final sweep's count tables.

Determinism: the RNG is Python's Mersenne Twister seeded from the config,
tokens are materialized by repeating each term id count times in ascending
id order, and sweeps visit documents in a canonical content-sorted order.
The canonical order makes document order irrelevant to the sampled
trajectory, so fitting a permuted corpus yields permuted assignments.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigError, LdaError, ArtifactError

log = logging.getLogger(__name__)

LL_EVERY = 50


@dataclass(frozen=True)
class LdaConfig:
    """Sampler hyperparameters. alpha defaults to 50/K when omitted."""

    num_topics: int
    alpha: float | None = None
    beta: float = 0.1
    iterations: int = 1000
    seed: int = 0
    top_n: int = 5

    def __post_init__(self):
        if self.num_topics < 1:
            raise ConfigError("num_topics must be >= 1")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if self.alpha is None:
            object.__setattr__(self, "alpha", 50.0 / self.num_topics)
        if self.alpha <= 0 or self.beta <= 0:
            raise ConfigError("alpha and beta must be > 0")
        if self.top_n < 1:
            raise ConfigError("top_n must be >= 1")


@dataclass(frozen=True)
class TopicModel:
    """Fitted model: point estimates plus the raw count tables."""

    doc_ids: tuple[str, ...]
    terms: tuple[str, ...]
    config: LdaConfig
    theta: np.ndarray
    phi: np.ndarray
    z: tuple[tuple[int, ...], ...]
    n_dk: np.ndarray
    n_kv: np.ndarray
    ll_history: tuple[tuple[int, float], ...] = field(default=())

    @property
    def num_docs(self) -> int:
        return len(self.doc_ids)

    @property
    def num_topics(self) -> int:
        return self.config.num_topics

    @property
    def vocab_size(self) -> int:
        return len(self.terms)

    @classmethod
    def from_artifacts(
        cls,
        meta: Mapping[str, str],
        doc_ids: Sequence[str],
        theta: np.ndarray,
        terms: Sequence[str],
        phi: np.ndarray,
    ) -> "TopicModel":
        """Rehydrate a point-estimate view from persisted theta/phi.

        Token assignments and count tables are not stored in the
        artifacts, so those fields stay empty; everything downstream of
        fit (analysis, indexing, serving) only needs the estimates.
        """
        cfg = LdaConfig(
            num_topics=int(meta["K"]),
            alpha=float(meta["alpha"]),
            beta=float(meta["beta"]),
            iterations=int(meta["iterations"]),
            seed=int(meta["seed"]),
        )
        return cls(
            doc_ids=tuple(doc_ids),
            terms=tuple(terms),
            config=cfg,
            theta=theta,
            phi=phi,
            z=(),
            n_dk=np.zeros((0, 0), dtype=np.int64),
            n_kv=np.zeros((0, 0), dtype=np.int64),
        )

    def top_words(self, n: int | None = None) -> tuple[tuple[tuple[str, float], ...], ...]:
        """Per topic, the n highest-probability terms.

        Sorted by descending probability; equal probabilities fall back to
        lexicographic term order.
        """
        if n is None:
            n = self.config.top_n
        if n > self.vocab_size:
            raise LdaError(f"top_words n={n} exceeds vocabulary size {self.vocab_size}")
        out = []
        for k in range(self.num_topics):
            ranked = sorted(
                ((self.terms[v], float(self.phi[k, v])) for v in range(self.vocab_size)),
                key=lambda tv: (-tv[1], tv[0]),
            )
            out.append(tuple(ranked[:n]))
        return tuple(out)


def _materialize(rows: Sequence[Mapping[int, int]]) -> list[list[int]]:
    docs = []
    for row in rows:
        tokens: list[int] = []
        for v in sorted(row):
            tokens.extend([v] * row[v])
        docs.append(tokens)
    return docs


def _log_likelihood(
    docs: Sequence[Sequence[int]],
    n_dk: np.ndarray,
    n_kv: np.ndarray,
    n_k: np.ndarray,
    alpha: float,
    beta: float,
) -> float:
    V = n_kv.shape[1]
    theta = (n_dk + alpha) / (n_dk.sum(axis=1, keepdims=True) + n_dk.shape[1] * alpha)
    phi = (n_kv + beta) / (n_k[:, None] + V * beta)
    total = 0.0
    for d, doc in enumerate(docs):
        word_probs = theta[d] @ phi
        for v in doc:
            total += math.log(word_probs[v])
    return total


def fit_counts(
    rows: Sequence[Mapping[int, int]],
    terms: Sequence[str],
    doc_ids: Sequence[str],
    cfg: LdaConfig,
    initial_z: Sequence[Sequence[int]] | None = None,
) -> TopicModel:
    """Fit the model to sparse term-count rows.

    initial_z optionally pins the starting assignment per document (token
    order matches materialization); omitted, assignments are drawn from the
    seeded RNG. Documents are visited in a canonical content-sorted order
    in every sweep, so the trajectory does not depend on row order.
    """
    D = len(rows)
    V = len(terms)
    K = cfg.num_topics
    if D < 1:
        raise LdaError("corpus has no documents")
    if V < 1:
        raise LdaError("vocabulary is empty")
    docs = _materialize(rows)
    for d, doc in enumerate(docs):
        if not doc:
            raise LdaError(f"document {doc_ids[d]} has no tokens (all-zero row)")
    total_tokens = sum(len(doc) for doc in docs)
    if K > total_tokens:
        log.warning(
            "num_topics %d exceeds total token count %d; model is degenerate",
            K,
            total_tokens,
        )

    alpha = float(cfg.alpha)
    beta = float(cfg.beta)
    rng = random.Random(cfg.seed)
    canonical = sorted(range(D), key=lambda d: (docs[d], d))

    n_dk = np.zeros((D, K), dtype=np.int64)
    n_kv = np.zeros((K, V), dtype=np.int64)
    n_k = np.zeros(K, dtype=np.int64)
    z: list[list[int]] = [[] for _ in range(D)]

    if initial_z is None:
        for d in canonical:
            z[d] = [int(rng.random() * K) for _ in docs[d]]
    else:
        if len(initial_z) != D:
            raise LdaError("initial_z length does not match document count")
        for d in range(D):
            if len(initial_z[d]) != len(docs[d]):
                raise LdaError(
                    f"initial_z for document {doc_ids[d]} has wrong token count"
                )
            z[d] = [int(k) for k in initial_z[d]]
    for d in range(D):
        for v, k in zip(docs[d], z[d]):
            n_dk[d, k] += 1
            n_kv[k, v] += 1
            n_k[k] += 1

    vbeta = V * beta
    history: list[tuple[int, float]] = [
        (0, _log_likelihood(docs, n_dk, n_kv, n_k, alpha, beta))
    ]
    for sweep in range(1, cfg.iterations + 1):
        for d in canonical:
            doc = docs[d]
            zd = z[d]
            row = n_dk[d]
            for t, v in enumerate(doc):
                k_old = zd[t]
                row[k_old] -= 1
                n_kv[k_old, v] -= 1
                n_k[k_old] -= 1
                weights = (row + alpha) * (n_kv[:, v] + beta) / (n_k + vbeta)
                cum = np.cumsum(weights)
                u = rng.random() * cum[-1]
                k_new = int(np.searchsorted(cum, u, side="right"))
                if k_new == K:
                    k_new = K - 1
                zd[t] = k_new
                row[k_new] += 1
                n_kv[k_new, v] += 1
                n_k[k_new] += 1
        if sweep % LL_EVERY == 0 or sweep == cfg.iterations:
            history.append(
                (sweep, _log_likelihood(docs, n_dk, n_kv, n_k, alpha, beta))
            )

    doc_totals = n_dk.sum(axis=1, keepdims=True)
    theta = (n_dk + alpha) / (doc_totals + K * alpha)
    phi = (n_kv + beta) / (n_k[:, None] + vbeta)
    return TopicModel(
        doc_ids=tuple(doc_ids),
        terms=tuple(terms),
        config=cfg,
        theta=theta,
        phi=phi,
        z=tuple(tuple(zd) for zd in z),
        n_dk=n_dk,
        n_kv=n_kv,
        ll_history=tuple(history),
    )


def fit(matrix, cfg: LdaConfig, initial_z=None) -> TopicModel:
    """Fit the model to a TraceIdentifierMatrix."""
    return fit_counts(
        matrix.rows, matrix.dictionary.terms, matrix.trace_ids, cfg, initial_z
    )


def _header(model: TopicModel) -> str:
    c = model.config
    return (
        f"# K={c.num_topics} V={model.vocab_size} D={model.num_docs} "
        f"alpha={c.alpha!r} beta={c.beta!r} seed={c.seed} iterations={c.iterations}"
    )


def export_theta(model: TopicModel) -> str:
    """Doc-topic estimates, one row per document, repr floats."""
    lines = [_header(model)]
    lines.append("doc\t" + "\t".join(f"topic_{k}" for k in range(model.num_topics)))
    for d, doc_id in enumerate(model.doc_ids):
        vals = "\t".join(repr(float(x)) for x in model.theta[d])
        lines.append(f"{doc_id}\t{vals}")
    return "\n".join(lines) + "\n"


def export_phi(model: TopicModel) -> str:
    """Topic-term estimates, one row per topic, columns are terms."""
    lines = [_header(model)]
    lines.append("topic\t" + "\t".join(model.terms))
    for k in range(model.num_topics):
        vals = "\t".join(repr(float(x)) for x in model.phi[k])
        lines.append(f"topic_{k}\t{vals}")
    return "\n".join(lines) + "\n"


def export_assignments(model: TopicModel) -> str:
    """Optional token-assignment dump: doc id, then one topic per token."""
    lines = [_header(model)]
    for doc_id, zd in zip(model.doc_ids, model.z):
        lines.append(doc_id + "\t" + " ".join(str(k) for k in zd))
    return "\n".join(lines) + "\n"


def export_ll_history(model: TopicModel) -> str:
    lines = ["sweep\tlog_likelihood"]
    for sweep, ll in model.ll_history:
        lines.append(f"{sweep}\t{ll!r}")
    return "\n".join(lines) + "\n"


def _parse_header(line: str) -> dict[str, str]:
    if not line.startswith("# "):
        raise ArtifactError("model artifact missing header line")
    out = {}
    for pair in line[2:].split():
        key, _, value = pair.partition("=")
        out[key] = value
    return out


def read_theta(text: str) -> tuple[dict[str, str], tuple[str, ...], np.ndarray]:
    """Parse a theta artifact: (header fields, doc ids, matrix)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    meta = _parse_header(lines[0])
    doc_ids = []
    rows = []
    for line in lines[2:]:
        parts = line.split("\t")
        doc_ids.append(parts[0])
        rows.append([float(x) for x in parts[1:]])
    return meta, tuple(doc_ids), np.array(rows, dtype=np.float64)


def read_phi(text: str) -> tuple[dict[str, str], tuple[str, ...], np.ndarray]:
    """Parse a phi artifact: (header fields, terms, matrix)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    meta = _parse_header(lines[0])
    terms = tuple(lines[1].split("\t")[1:])
    rows = []
    for line in lines[2:]:
        parts = line.split("\t")
        rows.append([float(x) for x in parts[1:]])
    return meta, terms, np.array(rows, dtype=np.float64)


def write_model(
    model: TopicModel,
    theta_path: str | Path,
    phi_path: str | Path,
    assignments_path: str | Path | None = None,
) -> None:
    Path(theta_path).write_text(export_theta(model), encoding="utf-8")
    Path(phi_path).write_text(export_phi(model), encoding="utf-8")
    if assignments_path is not None:
        Path(assignments_path).write_text(export_assignments(model), encoding="utf-8")
