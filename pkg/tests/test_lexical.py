"""BM25 checked against a naive full-scan recomputation of the formula."""

import math
from collections import Counter

import pytest

from igmirag.lexical import BM25Index, name_tokens

NAMES = {
    "1|francis bacon": "Francis Bacon",
    "1|george dyer": "George Dyer",
    "1|head i": "Head I",
    "2|francis bacon⊕head i": "<Francis Bacon, Head I>",
    "2|francis bacon⊕george dyer": "<George Dyer, Francis Bacon>",
    "3|a⊕b⊕c": "<Alpha Beta, Bacon Gamma, Delta>",
}


def naive_bm25(names: dict[str, str], query: str, k1=1.2, b=0.75) -> dict[str, float]:
    docs = {key: name_tokens(text) for key, text in names.items()}
    n = len(docs)
    avgdl = sum(len(d) for d in docs.values()) / n
    scores: dict[str, float] = {}
    for term in name_tokens(query):
        df = sum(1 for d in docs.values() if term in d)
        idf = math.log((n - df + 0.5) / (df + 0.5) + 1)
        for key, doc in docs.items():
            f = Counter(doc)[term]
            if f == 0:
                continue
            denom = f + k1 * (1 - b + b * len(doc) / avgdl)
            scores[key] = scores.get(key, 0.0) + idf * f * (k1 + 1) / denom
    return scores


def test_scores_match_naive_scan():
    index = BM25Index(NAMES)
    for query in ("francis bacon", "head", "george dyer head i", "bacon bacon"):
        expected = naive_bm25(NAMES, query)
        got = dict(index.search(query, top_n=100))
        assert set(got) == set(expected)
        for key in expected:
            assert got[key] == pytest.approx(expected[key], abs=1e-12)


def test_ranking_descends_with_key_tiebreak():
    index = BM25Index({"1|a": "same name", "1|b": "same name", "1|c": "other"})
    ranked = index.search("same name", top_n=10)
    assert [k for k, _ in ranked] == ["1|a", "1|b"]
    assert ranked[0][1] == ranked[1][1]


def test_repeated_query_token_counts_twice():
    index = BM25Index(NAMES)
    once = dict(index.search("bacon", top_n=100))
    twice = dict(index.search("bacon bacon", top_n=100))
    for key, score in once.items():
        assert twice[key] == pytest.approx(2 * score, rel=1e-12)


def test_idf_positive_even_for_ubiquitous_term():
    index = BM25Index({"1|a": "bacon", "1|b": "bacon", "1|c": "bacon"})
    assert index.idf("bacon") > 0


def test_no_match_returns_empty():
    index = BM25Index(NAMES)
    assert index.search("zzz qqq") == []
    assert index.search("") == []
    assert BM25Index({}).search("bacon") == []


def test_top_n_truncates():
    index = BM25Index(NAMES)
    assert len(index.search("bacon", top_n=2)) == 2


def test_from_graph_uses_display_names(demo_build):
    index = BM25Index.from_graph(demo_build.graph)
    ranked = index.search("Nicholas")
    keys = [k for k, _ in ranked]
    assert "1|sir nicholas bacon" in keys
