"""Feature-location index: construction, querying, drill-down, persistence.

A handcrafted two-topic world pins every posting list weight by direct
arithmetic. The session fixture run is only used for byte-stability of the
serialized index.
"""

import json

import numpy as np
import pytest

from tracetopics.analysis import ClassTopicMatrix
from tracetopics.errors import QueryError
from tracetopics.facts import ClassFact, FactsStore, MethodFact
from tracetopics.lda import LdaConfig, TopicModel
from tracetopics.matrix import TermDictionary, TraceIdentifierMatrix
from tracetopics.query import (
    INDEX_VERSION,
    QueryIndex,
    build_index,
    drill_down,
    format_drill_down_text,
    format_result_text,
    run_query,
)

TERMS = ("draw", "figur", "save")
METHODS = ("Canvas.draw()", "Canvas.paint()", "Store.save()")
METHOD_TERMS = ({0: 2, 1: 1}, {1: 1}, {2: 3})


def _world(doc_ids=("t0", "t1"), theta=None, trace_method=((1, 1, 0), (0, 0, 1))):
    dictionary = TermDictionary.from_terms(TERMS)
    matrix = TraceIdentifierMatrix(
        trace_ids=doc_ids,
        dictionary=dictionary,
        rows=({0: 2, 1: 2}, {2: 3}),
        methods=METHODS,
        trace_method=trace_method,
        method_terms=METHOD_TERMS,
    )
    store = FactsStore()
    for cls in ("Canvas", "Store"):
        store.add_class(ClassFact(cls))
    for key in METHODS:
        cls, rest = key.split(".", 1)
        store.add_method(
            MethodFact(
                method_key=key,
                class_name=cls,
                method_name=rest.split("(")[0],
                signature="()",
                return_type="",
            )
        )
    cfg = LdaConfig(num_topics=2, alpha=1.0, beta=0.1, iterations=1, seed=0, top_n=3)
    model = TopicModel(
        doc_ids=doc_ids,
        terms=TERMS,
        config=cfg,
        theta=np.array([[0.9, 0.1], [0.2, 0.8]]) if theta is None else theta,
        phi=np.array([[0.7, 0.2, 0.1], [0.1, 0.2, 0.7]]),
        z=(),
        n_dk=np.zeros((2, 2), dtype=np.int64),
        n_kv=np.zeros((2, 3), dtype=np.int64),
    )
    ctm = ClassTopicMatrix(
        class_names=("Canvas", "Store"),
        topic_ids=(0, 1),
        weights=np.array([[0.8, 0.2], [0.1, 0.9]]),
    )
    return model, ctm, store, matrix


@pytest.fixture()
def world_index():
    return build_index(*_world())


class TestBuildIndex:
    def test_term_topic_postings(self, world_index):
        assert world_index.term_topics["draw"] == ((0, 0.7), (1, 0.1))
        assert world_index.term_topics["save"] == ((1, 0.7), (0, 0.1))

    def test_term_class_postings_aggregate_counts(self, world_index):
        assert world_index.term_classes["draw"] == (("Canvas", 2.0),)
        assert world_index.term_classes["figur"] == (("Canvas", 2.0),)
        assert world_index.term_classes["save"] == (("Store", 3.0),)

    def test_term_method_ties_break_lexicographically(self, world_index):
        assert world_index.term_methods["figur"] == (
            ("Canvas.draw()", 1.0),
            ("Canvas.paint()", 1.0),
        )

    def test_topic_trace_postings(self, world_index):
        assert world_index.topic_traces[0] == (("t0", 0.9), ("t1", 0.2))
        assert world_index.topic_traces[1] == (("t1", 0.8), ("t0", 0.1))

    def test_topic_class_postings(self, world_index):
        assert world_index.topic_classes[0] == (("Canvas", 0.8), ("Store", 0.1))

    def test_topic_method_weights_are_normalized_mixtures(self, world_index):
        posts = dict(world_index.topic_methods[0])
        assert abs(posts["Canvas.draw()"] - 0.8) < 1e-12
        assert abs(posts["Canvas.paint()"] - 0.5) < 1e-12
        assert abs(posts["Store.save()"] - 0.125) < 1e-12
        names = [m for m, _ in world_index.topic_methods[0]]
        assert names == ["Canvas.draw()", "Canvas.paint()", "Store.save()"]

    def test_method_trace_links(self, world_index):
        assert world_index.method_traces["Canvas.draw()"] == ("t0",)
        assert world_index.method_traces["Store.save()"] == ("t1",)

    def test_top_words_copied_from_model(self, world_index):
        assert world_index.topic_top_words[0] == (
            ("draw", 0.7),
            ("figur", 0.2),
            ("save", 0.1),
        )

    def test_trace_posting_ties_sort_by_id(self):
        theta = np.array([[0.5, 0.5], [0.5, 0.5]])
        index = build_index(
            *_world(
                doc_ids=("b", "a"),
                theta=theta,
                trace_method=((1, 1, 0), (1, 0, 1)),
            )
        )
        assert index.topic_traces[0] == (("a", 0.5), ("b", 0.5))
        assert index.method_traces["Canvas.draw()"] == ("a", "b")

    def test_vocabulary_drift_detected(self):
        model, ctm, store, matrix = _world()
        stale = TopicModel(
            doc_ids=model.doc_ids,
            terms=("draw", "figur"),
            config=model.config,
            theta=model.theta,
            phi=model.phi[:, :2],
            z=(),
            n_dk=model.n_dk,
            n_kv=model.n_kv[:, :2],
        )
        with pytest.raises(QueryError) as err:
            build_index(stale, ctm, store, matrix)
        assert "stale artifact" in str(err.value)

    def test_topic_count_drift_detected(self):
        model, ctm, store, matrix = _world()
        narrow = ClassTopicMatrix(
            class_names=ctm.class_names,
            topic_ids=(0,),
            weights=ctm.weights[:, :1],
        )
        with pytest.raises(QueryError) as err:
            build_index(model, narrow, store, matrix)
        assert "stale artifact" in str(err.value)

    def test_missing_method_detected(self):
        model, ctm, store, matrix = _world()
        bare = FactsStore()
        bare.add_class(ClassFact("Canvas"))
        with pytest.raises(QueryError) as err:
            build_index(model, ctm, bare, matrix)
        assert "stale artifact" in str(err.value)


class TestRunQuery:
    def test_scores_add_over_query_terms(self, world_index):
        result = run_query("draw the figure", world_index)
        assert result.terms == ("draw", "figur")
        assert result.topics[0].topic_id == 0
        assert result.topics[0].score == 0.7 + 0.2
        assert result.topics[1].topic_id == 1
        assert result.topics[1].score == 0.1 + 0.2

    def test_additivity_against_single_term_queries(self, world_index):
        combined = run_query("draw save", world_index)
        solo_draw = run_query("draw", world_index)
        solo_save = run_query("save", world_index)
        for hit in combined.topics:
            d = dict((h.topic_id, h.score) for h in solo_draw.topics)
            s = dict((h.topic_id, h.score) for h in solo_save.topics)
            assert hit.score == d[hit.topic_id] + s[hit.topic_id]

    def test_results_sorted_by_score_then_id(self, world_index):
        result = run_query("figure", world_index)
        assert [h.topic_id for h in result.topics] == [0, 1]
        assert result.topics[0].score == result.topics[1].score == 0.2

    def test_unknown_word_notice(self, world_index):
        result = run_query("quantum", world_index)
        assert result.topics == ()
        assert result.notice == "no indexed term matches the query"

    def test_partial_match_has_no_notice(self, world_index):
        result = run_query("draw quantum", world_index)
        assert result.notice is None
        assert result.topics[0].topic_id == 0

    def test_zero_weight_postings_drop_out(self, world_index):
        payload = json.loads(world_index.dumps())
        payload["term_topics"]["save"] = [[0, 0.0], [1, 0.0]]
        doctored = QueryIndex.from_payload(payload)
        result = run_query("save", doctored)
        assert result.topics == ()
        assert result.notice == "no topic scored above zero"

    def test_empty_queries_rejected(self, world_index):
        for q in ("", "the", "42", "the 42"):
            with pytest.raises(QueryError) as err:
                run_query(q, world_index)
            assert "empty query" in str(err.value)

    def test_payload_shape(self, world_index):
        payload = run_query("draw", world_index).to_payload()
        assert payload["query"] == "draw"
        assert payload["terms"] == ["draw"]
        assert payload["notice"] is None
        assert payload["topics"][0]["topic"] == 0
        assert payload["topics"][0]["score"] == 0.7


class TestDrillDown:
    def test_listings_match_index_postings(self, world_index):
        dd = drill_down(0, world_index)
        assert dd.topic_id == 0
        assert dd.top_words == world_index.topic_top_words[0]
        assert dd.classes == world_index.topic_classes[0]
        assert dd.methods == world_index.topic_methods[0]
        assert dd.traces == world_index.topic_traces[0]

    def test_top_n_caps_listings(self, world_index):
        dd = drill_down(0, world_index, top_n=1)
        assert len(dd.classes) == 1
        assert len(dd.methods) == 1
        assert len(dd.traces) == 1
        assert dd.classes[0] == ("Canvas", 0.8)

    def test_unknown_topic_rejected(self, world_index):
        with pytest.raises(QueryError) as err:
            drill_down(99, world_index)
        assert "topic 99 not found" in str(err.value)

    def test_referential_integrity(self, world_index):
        dd = drill_down(1, world_index)
        for cls, _ in dd.classes:
            assert cls in ("Canvas", "Store")
        for key, _ in dd.methods:
            assert key in METHODS
        for trace_id, _ in dd.traces:
            assert trace_id in ("t0", "t1")

    def test_payload_shape(self, world_index):
        payload = drill_down(0, world_index, top_n=2).to_payload()
        assert payload["topic"] == 0
        assert payload["classes"] == [["Canvas", 0.8], ["Store", 0.1]]


class TestPersistence:
    def test_dumps_is_deterministic(self, world_index):
        again = build_index(*_world())
        assert world_index.dumps() == again.dumps()

    def test_payload_round_trip(self, world_index):
        clone = QueryIndex.from_payload(json.loads(world_index.dumps()))
        assert clone == world_index

    def test_save_and_load(self, world_index, tmp_path):
        path = tmp_path / "index.json"
        world_index.save(path)
        assert QueryIndex.load(path) == world_index
        assert path.read_text(encoding="utf-8") == world_index.dumps()

    def test_version_mismatch_rejected(self, world_index):
        payload = json.loads(world_index.dumps())
        payload["version"] = "0"
        with pytest.raises(QueryError) as err:
            QueryIndex.from_payload(payload)
        assert INDEX_VERSION in str(err.value)

    def test_malformed_file_rejected(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(QueryError):
            QueryIndex.load(path)

    def test_fixture_run_index_is_byte_stable(
        self, fixture_corpus, fixture_matrix, fixture_model
    ):
        from tracetopics.analysis import class_topic_matrix
        from tracetopics.facts import ingest_facts
        from tests.conftest import FACTS

        store = ingest_facts(FACTS)
        ctm = class_topic_matrix(
            fixture_model, store, fixture_matrix.methods, fixture_matrix.method_terms
        )
        a = build_index(fixture_model, ctm, store, fixture_matrix)
        b = build_index(fixture_model, ctm, store, fixture_matrix)
        assert a.dumps() == b.dumps()


class TestTextFormats:
    def test_result_text(self, world_index):
        text = format_result_text(run_query("draw", world_index))
        lines = text.splitlines()
        assert lines[0] == "query: draw"
        assert lines[1] == "terms: draw"
        assert "0.700000" in lines[3]
        assert text.endswith("\n")

    def test_result_text_includes_notice(self, world_index):
        text = format_result_text(run_query("quantum", world_index))
        assert "notice: no indexed term matches the query" in text

    def test_drill_down_text(self, world_index):
        text = format_drill_down_text(drill_down(0, world_index))
        assert text.startswith("topic 0: draw figur save")
        assert "classes:" in text
        assert "0.800000" in text
