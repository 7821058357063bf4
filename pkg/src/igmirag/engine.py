"""Query engine: strategy parsing through answer generation over a store.

A store directory holds the graph and the vector index; the lexical
index is cheap and is rebuilt from the graph on load.  Strategy parse
failures downgrade to the fallback strategy instead of failing the
query; gateway errors propagate after stashing whatever diffusion trace
already exists so callers can dump a partial artifact.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from .anchors import AnchorResult, chunk_relevance, retrieve_anchors
from .config import EngineConfig
from .context import (
    AnswerResult,
    ContextWindow,
    answer,
    assemble,
    fuse_chunk_scores,
    select_chunks,
    select_units,
    window_quotas,
)
from .dfindex import DFIndex
from .diffusion import DiffusionResult, diffuse
from .errors import CorruptStore, GatewayError, ParseFailure
from .extraction import GRAPH_FILE, VECTOR_FILE
from .gateway import Gateway, make_gateway
from .hypergraph import Hypergraph
from .lexical import BM25Index
from .strategy import Strategy, fallback_strategy, parse_strategy

logger = logging.getLogger(__name__)


@dataclass
class QueryResult:
    question: str
    strategy: Strategy
    fallback_used: bool
    anchors: dict[str, float]
    initial_chunk_scores: dict[str, float]
    extended_scores: dict[str, float]
    diffusion: DiffusionResult | None
    fused_chunk_scores: dict[str, float]
    window: ContextWindow
    answer: AnswerResult
    prompt_tokens: int
    completion_tokens: int

    @property
    def total_tokens(self) -> int:
        return self.prompt_tokens + self.completion_tokens

    @property
    def depth_used(self) -> int:
        return self.strategy.semantic_depth


class Engine:
    def __init__(
        self,
        graph: Hypergraph,
        df_index: DFIndex,
        lexical: BM25Index,
        config: EngineConfig,
        gateway: Gateway,
    ):
        self.graph = graph
        self.df_index = df_index
        self.lexical = lexical
        self.config = config
        self.gateway = gateway
        # Diffusion trace from the most recent query attempt, kept so a
        # gateway failure after diffusion can still emit a partial trace.
        self.last_diffusion: DiffusionResult | None = None

    @classmethod
    def load(
        cls,
        store_dir: str | Path,
        config: EngineConfig | None = None,
        gateway: Gateway | None = None,
    ) -> "Engine":
        store_dir = Path(store_dir)
        if config is None:
            config = EngineConfig()
        graph_path = store_dir / GRAPH_FILE
        vector_path = store_dir / VECTOR_FILE
        for path in (graph_path, vector_path):
            if not path.exists():
                raise CorruptStore(f"store file missing: {path}")
        graph = Hypergraph.load(graph_path)
        df_index = DFIndex.load(vector_path)
        lexical = BM25Index.from_graph(
            graph, k1=config.lexical.k1, b=config.lexical.b
        )
        if gateway is None:
            gateway = make_gateway(config.gateway, config.base_dir)
        return cls(graph, df_index, lexical, config, gateway)

    def parse_or_fallback(self, question: str) -> tuple[Strategy, bool]:
        try:
            return parse_strategy(question, self.gateway), False
        except ParseFailure as exc:
            logger.warning("strategy parse failed (%s); using fallback", exc)
            return fallback_strategy(question), True

    def query(self, question: str, use_diffusion: bool = True) -> QueryResult:
        """Run the full retrieval and answer pipeline for one question."""
        ledger = self.gateway.ledger
        prompt_before = ledger.prompt_total
        completion_before = ledger.completion_total
        self.last_diffusion = None

        strategy, fallback_used = self.parse_or_fallback(question)
        anchor_result: AnchorResult = retrieve_anchors(
            strategy, self.df_index, self.lexical, self.gateway
        )
        anchors = anchor_result.anchors
        initial_chunks = chunk_relevance(anchors, self.graph)

        diffusion_result: DiffusionResult | None = None
        if use_diffusion:
            diffusion_result = diffuse(
                self.graph,
                anchors,
                target_layer=int(strategy.target_layer),
                depth=strategy.semantic_depth,
                params=self.config.diffusion,
            )
            self.last_diffusion = diffusion_result
            extended = diffusion_result.scores
            fused = fuse_chunk_scores(
                initial_chunks, extended, self.graph, self.config.fusion.w
            )
        else:
            # Ablation path: context comes strictly from the anchors and
            # their chunks.
            extended = dict(anchors)
            fused = dict(initial_chunks)

        top_ku, top_kc = window_quotas(strategy.semantic_depth, self.config.window)
        unit_keys = select_units(anchors, extended, top_ku)
        chunk_ids = select_chunks(fused, top_kc)
        units = [self.graph.vertices[key] for key in unit_keys]
        chunks = [self.graph.chunks[chunk_id] for chunk_id in chunk_ids]
        window = assemble(question, strategy, units, chunks, self.config.window)

        answer_result = answer(question, window, self.gateway, self.config.answer.mode)
        return QueryResult(
            question=question,
            strategy=strategy,
            fallback_used=fallback_used,
            anchors=anchors,
            initial_chunk_scores=initial_chunks,
            extended_scores=extended,
            diffusion=diffusion_result,
            fused_chunk_scores=fused,
            window=window,
            answer=answer_result,
            prompt_tokens=ledger.prompt_total - prompt_before,
            completion_tokens=ledger.completion_total - completion_before,
        )
