"""Synthetic corpus generators: samplers, planted docs, micro-projects.

Every generator takes an explicit seed, so each check here is frozen: the
sampled values cannot drift between runs unless the generator changes.
"""

import random
import shutil

import pytest

from tracetopics.errors import ConfigError
from tracetopics.facts import ingest_facts
from tracetopics.scoring import score_methods
from tracetopics.synthgen import (
    DEFAULT_FEATURES,
    PlantedSpec,
    ProjectSpec,
    dirichlet,
    generate_planted_docs,
    generate_project,
    poisson,
)
from tracetopics.traces import corpus_counts, ingest_manifest, method_key


class TestPoisson:
    def test_deterministic(self):
        a = [poisson(random.Random(3), 5.0) for _ in range(10)]
        b = [poisson(random.Random(3), 5.0) for _ in range(10)]
        assert a == b

    def test_values_are_counts(self):
        rng = random.Random(42)
        draws = [poisson(rng, 4.0) for _ in range(2000)]
        assert all(isinstance(d, int) and d >= 0 for d in draws)
        assert abs(sum(draws) / len(draws) - 4.0) < 0.2

    def test_invalid_mean_rejected(self):
        for mean in (0.0, -1.0):
            with pytest.raises(ConfigError):
                poisson(random.Random(0), mean)


class TestDirichlet:
    def test_simplex_point(self):
        rng = random.Random(7)
        for alphas in ([0.1, 0.1, 0.1], [1.0, 2.0], [5.0] * 4):
            draw = dirichlet(rng, alphas)
            assert len(draw) == len(alphas)
            assert all(x > 0 for x in draw)
            assert abs(sum(draw) - 1.0) < 1e-12

    def test_deterministic(self):
        a = dirichlet(random.Random(7), [0.1, 0.1])
        b = dirichlet(random.Random(7), [0.1, 0.1])
        assert a == b


PLANTED = PlantedSpec(
    vocabularies=(
        tuple(f"alpha_{i}" for i in range(5)),
        tuple(f"bravo_{i}" for i in range(5)),
    ),
    num_docs=12,
    mean_length=15.0,
    doc_alpha=0.1,
)


class TestPlantedDocs:
    def test_shape_and_vocabulary(self):
        docs, terms = generate_planted_docs(PLANTED, seed=1)
        assert len(docs) == 12
        assert terms == tuple(sorted(terms))
        union = set(terms)
        for row in docs:
            assert row, "documents must not be empty"
            assert set(row) <= union
            assert all(c >= 1 for c in row.values())

    def test_deterministic_per_seed(self):
        a, _ = generate_planted_docs(PLANTED, seed=5)
        b, _ = generate_planted_docs(PLANTED, seed=5)
        c, _ = generate_planted_docs(PLANTED, seed=6)
        assert a == b
        assert a != c

    def test_terms_cover_all_vocabularies(self):
        _, terms = generate_planted_docs(PLANTED, seed=1)
        assert set(terms) == {t for vocab in PLANTED.vocabularies for t in vocab}


class TestGenerateProject:
    def test_output_is_ingestable(self, tmp_path):
        manifest = generate_project(tmp_path / "proj", seed=0)
        corpus = ingest_manifest(manifest)
        spec = ProjectSpec()
        assert len(corpus) == len(DEFAULT_FEATURES) * spec.traces_per_feature
        use_cases = {t.use_case_id for t in corpus}
        assert use_cases == {f.name for f in DEFAULT_FEATURES}
        store = ingest_facts(tmp_path / "proj" / "facts.tsv")
        store.validate()
        for trace in corpus:
            for event in trace.method_entries():
                assert event.key in store.methods

    def test_utility_method_is_omnipresent(self, tmp_path):
        manifest = generate_project(tmp_path / "proj", seed=3)
        corpus = ingest_manifest(manifest)
        util = method_key("Logger", "log", "(String)")
        for trace in corpus:
            assert util in trace.method_counts()
        table = score_methods(corpus_counts(corpus))
        assert table.scores[util] == 0.0

    def test_trace_files_are_byte_deterministic(self, tmp_path):
        m1 = generate_project(tmp_path / "a", seed=9)
        m2 = generate_project(tmp_path / "b", seed=9)
        m3 = generate_project(tmp_path / "c", seed=10)
        facts_a = (tmp_path / "a" / "facts.tsv").read_bytes()
        facts_b = (tmp_path / "b" / "facts.tsv").read_bytes()
        assert facts_a == facts_b
        names = sorted(p.name for p in (tmp_path / "a" / "traces").iterdir())
        assert names == sorted(p.name for p in (tmp_path / "b" / "traces").iterdir())
        for name in names:
            assert (tmp_path / "a" / "traces" / name).read_bytes() == (
                tmp_path / "b" / "traces" / name
            ).read_bytes()
        differs = any(
            (tmp_path / "a" / "traces" / n).read_bytes()
            != (tmp_path / "c" / "traces" / n).read_bytes()
            for n in names
        )
        assert differs, "different seeds should give different call sequences"
        assert m1 != m2 and m2 != m3

    def test_manifest_rows_reference_trace_files(self, tmp_path):
        manifest = generate_project(tmp_path / "proj", seed=0)
        lines = manifest.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 6
        for line in lines:
            trace_id, use_case, path = line.split("\t")
            assert trace_id.startswith(use_case)
            assert path == f"traces/{trace_id}.trace"

    def test_project_directory_is_relocatable(self, tmp_path):
        """Manifest paths stay valid when the whole project moves."""
        generate_project(tmp_path / "orig", seed=0)
        shutil.move(str(tmp_path / "orig"), str(tmp_path / "moved"))
        corpus = ingest_manifest(tmp_path / "moved" / "manifest.tsv")
        assert len(corpus) == 6
