import numpy as np
import pytest
from hypothesis import given, strategies as st

from igmirag.anchors import chunk_relevance, retrieve_anchors, rrf_fuse
from igmirag.hypergraph import Hypergraph, Layer, Vertex
from igmirag.strategy import fallback_strategy
from igmirag.tokens import Chunk


class TestRrf:
    def test_hand_computed_two_list_fusion(self):
        fused = rrf_fuse([["a", "b", "c"], ["b", "a"]])
        assert fused["a"] == 1 / 61 + 1 / 62
        assert fused["b"] == 1 / 62 + 1 / 61
        assert fused["c"] == 1 / 63

    def test_single_list(self):
        fused = rrf_fuse([["x", "y"]])
        assert list(fused) == ["x", "y"]
        assert fused["x"] == 1 / 61

    def test_order_descending_with_key_tiebreak(self):
        fused = rrf_fuse([["a"], ["b"]])
        assert list(fused) == ["a", "b"]
        assert fused["a"] == fused["b"]

    def test_empty_rankings_rejected(self):
        with pytest.raises(ValueError):
            rrf_fuse([])

    def test_empty_inner_lists_allowed(self):
        assert rrf_fuse([[], []]) == {}

    @given(
        st.lists(st.sampled_from("abcdefgh"), unique=True, max_size=8),
        st.lists(st.sampled_from("abcdefgh"), unique=True, max_size=8),
    )
    def test_matches_direct_formula(self, r1, r2):
        fused = rrf_fuse([r1, r2])
        for key in set(r1) | set(r2):
            expected = 0.0
            if key in r1:
                expected += 1.0 / (60 + r1.index(key) + 1)
            if key in r2:
                expected += 1.0 / (60 + r2.index(key) + 1)
            assert fused[key] == pytest.approx(expected, abs=1e-15)


def small_graph() -> Hypergraph:
    g = Hypergraph()
    for cid in ("D#0", "D#1"):
        g.add_chunk(Chunk(id=cid, source_title="D", text="t.", token_count=1))
    g.upsert_vertex(
        Vertex(key="1|a", layer=Layer.ENTITY, name="A", chunk_ids={"D#0", "D#1"})
    )
    g.upsert_vertex(Vertex(key="1|b", layer=Layer.ENTITY, name="B", chunk_ids={"D#1"}))
    g.upsert_vertex(Vertex(key="1|orphan", layer=Layer.ENTITY, name="Orphan"))
    return g


class TestChunkRelevance:
    def test_even_split_over_chunks(self):
        g = small_graph()
        scores = chunk_relevance({"1|a": 1.0, "1|b": 0.5}, g)
        assert scores["D#0"] == pytest.approx(0.5)
        assert scores["D#1"] == pytest.approx(1.0)

    def test_mass_conserved(self):
        g = small_graph()
        anchors = {"1|a": 0.7, "1|b": 0.9}
        scores = chunk_relevance(anchors, g)
        assert sum(scores.values()) == pytest.approx(sum(anchors.values()), abs=1e-12)

    def test_zero_degree_vertex_contributes_nothing(self):
        g = small_graph()
        scores = chunk_relevance({"1|orphan": 5.0}, g)
        assert scores == {}

    def test_unknown_vertex_raises(self):
        with pytest.raises(KeyError):
            chunk_relevance({"1|ghost": 1.0}, small_graph())

    def test_output_sorted_by_score(self):
        g = small_graph()
        scores = chunk_relevance({"1|a": 1.0, "1|b": 3.0}, g)
        values = list(scores.values())
        assert values == sorted(values, reverse=True)


class TestRetrieveAnchors:
    def test_channels_fuse_and_rank(self, demo_build, demo_gateway):
        from igmirag.lexical import BM25Index

        lexical = BM25Index.from_graph(demo_build.graph)
        strategy = fallback_strategy("Who painted Head I?")
        strategy.keywords = ["Head I", "painted"]
        result = retrieve_anchors(strategy, demo_build.df_index, lexical, demo_gateway)
        assert result.anchors
        assert "1|head i" in result.anchors
        assert set(result.anchors) == set(result.df_ranking) | set(result.bm25_ranking)
        expected = rrf_fuse([result.bm25_ranking, result.df_ranking])
        assert result.anchors == expected

    def test_empty_keyword_channel_still_returns_semantic_hits(self, demo_build, demo_gateway):
        from igmirag.lexical import BM25Index

        lexical = BM25Index.from_graph(demo_build.graph)
        strategy = fallback_strategy("zzz qqq unmatchable")
        result = retrieve_anchors(strategy, demo_build.df_index, lexical, demo_gateway)
        assert result.bm25_ranking == []
        assert result.anchors
        assert list(result.anchors) == result.df_ranking
