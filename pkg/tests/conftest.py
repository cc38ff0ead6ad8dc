"""Shared fixtures for the test suite.

The bundled micro-project corpus under fixtures/microdraw is the common
input: six traces over three use cases, a facts file for seven classes,
and a pinned config. The full pipeline is fitted once per session into a
temporary run directory; read-only tests share it, while tests that need
to mutate artifacts or refit build their own directories from the same
inputs.
"""

from __future__ import annotations

from pathlib import Path

import pytest

from tracetopics import pipeline as pl

FIXTURES = Path(__file__).parent / "fixtures"
MICRODRAW = FIXTURES / "microdraw"
MANIFEST = MICRODRAW / "manifest.tsv"
FACTS = MICRODRAW / "facts.tsv"
CONFIG = MICRODRAW / "fixture.conf"
GOLDEN = Path(__file__).parent / "golden"


def microdraw_config(out: Path) -> pl.PipelineConfig:
    """The bundled corpus with its pinned fitting parameters."""
    return pl.build_config(
        CONFIG,
        {"manifest": str(MANIFEST), "facts": str(FACTS), "out": str(out)},
    )


@pytest.fixture(scope="session")
def run_dir(tmp_path_factory) -> Path:
    """One complete pipeline run over the bundled corpus."""
    out = tmp_path_factory.mktemp("microdraw_run")
    pl.run_pipeline(microdraw_config(out))
    return out


@pytest.fixture(scope="session")
def fixture_corpus():
    from tracetopics.traces import ingest_manifest

    return ingest_manifest(MANIFEST)


@pytest.fixture(scope="session")
def fixture_matrix(fixture_corpus):
    """The trace-identifier matrix for the bundled corpus."""
    from tracetopics.facts import ingest_facts
    from tracetopics.matrix import build_matrix
    from tracetopics.scoring import filter_methods, score_methods
    from tracetopics.traces import compress_trace, corpus_counts

    table = score_methods(corpus_counts(fixture_corpus))
    _, kept, _ = filter_methods(table, 0.001)
    compressed = [compress_trace(t) for t in fixture_corpus]
    return build_matrix(compressed, kept, ingest_facts(FACTS))


@pytest.fixture(scope="session")
def fixture_model(fixture_matrix):
    """A model fitted with the pinned fixture parameters."""
    from tracetopics.lda import LdaConfig, fit

    return fit(fixture_matrix, LdaConfig(num_topics=3, iterations=200, seed=7))
