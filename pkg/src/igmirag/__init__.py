"""Hypergraph-indexed retrieval-augmented generation engine."""

from .anchors import chunk_relevance, retrieve_anchors, rrf_fuse
from .config import EngineConfig
from .context import ContextWindow, answer, assemble, window_quotas
from .dfindex import DFIndex, QuotaParams, quotas
from .diffusion import DiffusionParams, DiffusionResult, diffuse
from .engine import Engine, QueryResult
from .errors import (
    BuildFailure,
    CorruptStore,
    ExtractionFailure,
    FixtureMissing,
    GatewayError,
    InvariantViolation,
    JudgeFailure,
    ParseFailure,
)
from .extraction import BuildResult, build_index, load_corpus, save_store
from .gateway import Gateway, GatewayConfig, TokenLedger, make_gateway
from .hnsw import HnswIndex, HnswParams
from .hypergraph import Hypergraph, Layer, Vertex, canonical_key
from .lexical import BM25Index
from .metrics import JudgeScore, ShortFormScore, judge_score, short_form_score
from .report import EvalRecord, EvalReport, run_eval
from .strategy import Strategy, composite_query, fallback_strategy, parse_strategy

__version__ = "0.1.0"

__all__ = [
    "BM25Index",
    "BuildFailure",
    "BuildResult",
    "ContextWindow",
    "CorruptStore",
    "DFIndex",
    "DiffusionParams",
    "DiffusionResult",
    "Engine",
    "EngineConfig",
    "EvalRecord",
    "EvalReport",
    "ExtractionFailure",
    "FixtureMissing",
    "Gateway",
    "GatewayConfig",
    "GatewayError",
    "HnswIndex",
    "HnswParams",
    "Hypergraph",
    "InvariantViolation",
    "JudgeFailure",
    "JudgeScore",
    "Layer",
    "ParseFailure",
    "QueryResult",
    "QuotaParams",
    "ShortFormScore",
    "Strategy",
    "TokenLedger",
    "Vertex",
    "answer",
    "assemble",
    "build_index",
    "canonical_key",
    "chunk_relevance",
    "composite_query",
    "diffuse",
    "fallback_strategy",
    "judge_score",
    "load_corpus",
    "make_gateway",
    "parse_strategy",
    "quotas",
    "retrieve_anchors",
    "rrf_fuse",
    "run_eval",
    "save_store",
    "short_form_score",
    "window_quotas",
    "__version__",
]
