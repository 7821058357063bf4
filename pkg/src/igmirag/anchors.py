"""Multi-channel anchor recall: BM25 over names plus dual-focus vector
search, fused by reciprocal rank, then propagated to initial chunk scores."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .dfindex import quotas
from .strategy import Strategy, composite_query

logger = logging.getLogger(__name__)

RRF_K0 = 60


def rrf_fuse(rankings: list[list[str]], k0: int = RRF_K0) -> dict[str, float]:
    """s(v) = sum over rankings containing v of 1/(k0 + rank), ranks 1-based.
    Returned dict is ordered by descending score, ties by ascending key."""
    if not rankings:
        raise ValueError("rankings must be nonempty")
    scores: dict[str, float] = {}
    for ranking in rankings:
        for rank, key in enumerate(ranking, start=1):
            scores[key] = scores.get(key, 0.0) + 1.0 / (k0 + rank)
    return dict(sorted(scores.items(), key=lambda kv: (-kv[1], kv[0])))


@dataclass
class AnchorResult:
    anchors: dict[str, float] = field(default_factory=dict)
    df_ranking: list[str] = field(default_factory=list)
    bm25_ranking: list[str] = field(default_factory=list)


def retrieve_anchors(s: Strategy, df_index, lexical, gateway) -> AnchorResult:
    """Run both recall channels for a parsed strategy and fuse them.

    The semantic channel searches with the rewritten question's embedding;
    the keyword channel searches BM25 with the composite query, budgeted at
    k_G + k_L so both channels contribute comparable list lengths.
    """
    query_vec = gateway.embed([s.rewrite_question])[0]
    df_ranking = df_index.search(query_vec, int(s.target_layer), s.matching_score)

    qp = df_index.quota_params
    k_g, k_l = quotas(s.matching_score, qp.k_b, qp.k_min, qp.k_max)
    keyword_query = composite_query(s)
    bm25_ranking = [key for key, _ in lexical.search(keyword_query, top_n=k_g + k_l)]

    anchors = rrf_fuse([bm25_ranking, df_ranking])
    if not anchors:
        logger.warning("both recall channels empty for %r", s.question)
    return AnchorResult(anchors=anchors, df_ranking=df_ranking, bm25_ranking=bm25_ranking)


def chunk_relevance(anchors: dict[str, float], graph) -> dict[str, float]:
    """Distribute each vertex score evenly over its source chunks:
    s(c) = sum over vertices v linked to c of s(v) / chunk_degree(v).
    Total chunk mass equals total vertex mass when every vertex has a chunk."""
    scores: dict[str, float] = {}
    for key in sorted(anchors):
        vertex = graph.vertices.get(key)
        if vertex is None:
            raise KeyError(key)
        degree = len(vertex.chunk_ids)
        if degree == 0:
            continue
        share = anchors[key] / degree
        for chunk_id in sorted(vertex.chunk_ids):
            scores[chunk_id] = scores.get(chunk_id, 0.0) + share
    return dict(sorted(scores.items(), key=lambda kv: (-kv[1], kv[0])))
