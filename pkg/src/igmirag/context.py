"""Depth-adaptive context window assembly and answer generation.

The semantic depth chosen by the query strategy scales both recall
budgets: expansion units beyond the anchors are capped at 5*d and
chunks at 2*d (multipliers configurable).  Anchors themselves are never
evicted, so the unit list can exceed the expansion budget when many
anchors arrive.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .anchors import chunk_relevance
from .gateway import Gateway
from .hypergraph import Hypergraph, Layer, Vertex
from .prompts import load_prompt
from .strategy import Strategy
from .tokens import Chunk

logger = logging.getLogger(__name__)

SECTION_HEADERS = {
    Layer.ENTITY: "-*Entities*-",
    Layer.PAIR_RELATION: "-*Pairwise Relations*-",
    Layer.MULTI_ASSOCIATION: "-*Multiple Associations*-",
}
PASSAGE_HEADER = "-*Passages*-"


@dataclass
class WindowParams:
    unit_multiplier: int = 5
    chunk_multiplier: int = 2

    def validate(self) -> None:
        if self.unit_multiplier < 1 or self.chunk_multiplier < 1:
            raise ValueError("window multipliers must be at least 1")


@dataclass
class ContextWindow:
    units: list[Vertex]
    chunks: list[Chunk]
    rendered: str
    budget: tuple[int, int]


@dataclass
class AnswerResult:
    thought: str
    answer: str
    prompt_tokens: int
    completion_tokens: int

    @property
    def token_usage(self) -> dict[str, int]:
        return {
            "prompt_tokens": self.prompt_tokens,
            "completion_tokens": self.completion_tokens,
        }


def window_quotas(depth: int, params: WindowParams | None = None) -> tuple[int, int]:
    """Recall budgets (top_ku, top_kc) for a semantic depth in [1, 5].

    >>> window_quotas(2)
    (10, 4)
    >>> window_quotas(1)
    (5, 2)
    >>> window_quotas(5)
    (25, 10)
    """
    if params is None:
        params = WindowParams()
    params.validate()
    if not 1 <= depth <= 5:
        raise ValueError(f"depth must be in [1, 5], got {depth}")
    return params.unit_multiplier * depth, params.chunk_multiplier * depth


def select_units(
    anchors: dict[str, float], extended: dict[str, float], top_ku: int
) -> list[str]:
    """Anchors by initial score, then top expansion vertices by extended score.

    The expansion set is the extended keys minus the anchor keys, capped
    at ``top_ku``; anchors are kept in full and appear only once even
    when diffusion boosted them.
    """
    missing = sorted(set(anchors) - set(extended))
    if missing:
        raise ValueError(f"extended scores missing anchor keys: {missing[:3]}")
    ordered_anchors = sorted(anchors, key=lambda k: (-anchors[k], k))
    expansion = sorted(
        (k for k in extended if k not in anchors),
        key=lambda k: (-extended[k], k),
    )[: max(top_ku, 0)]
    return ordered_anchors + expansion


def fuse_chunk_scores(
    initial: dict[str, float],
    extended_vertex_scores: dict[str, float],
    graph: Hypergraph,
    w: float = 0.5,
) -> dict[str, float]:
    """Blend initial chunk relevance with relevance recomputed from the
    extended vertex scores: final = w*initial + (1-w)*extended."""
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"fusion weight must be in [0, 1], got {w}")
    extended = chunk_relevance(extended_vertex_scores, graph)
    fused = {}
    for chunk_id in set(initial) | set(extended):
        fused[chunk_id] = w * initial.get(chunk_id, 0.0) + (1.0 - w) * extended.get(
            chunk_id, 0.0
        )
    return dict(sorted(fused.items(), key=lambda kv: (-kv[1], kv[0])))


def select_chunks(fused: dict[str, float], top_kc: int) -> list[str]:
    """Top chunk ids by fused score, ties broken by id."""
    ordered = sorted(fused, key=lambda k: (-fused[k], k))
    return ordered[: max(top_kc, 0)]


def render_context(units: list[Vertex], chunks: list[Chunk]) -> str:
    """Sectioned context text; empty sections keep their headers."""
    lines: list[str] = []
    for layer in (Layer.ENTITY, Layer.PAIR_RELATION, Layer.MULTI_ASSOCIATION):
        lines.append(SECTION_HEADERS[layer])
        for unit in units:
            if unit.layer != layer:
                continue
            if unit.description:
                lines.append(f"- {unit.name}: {unit.description}")
            else:
                lines.append(f"- {unit.name}")
        lines.append("")
    lines.append(PASSAGE_HEADER)
    for chunk in chunks:
        lines.append(f"- Title: {chunk.source_title}")
        lines.append(chunk.text)
    return "\n".join(lines).rstrip("\n") + "\n"


def assemble(
    query: str,
    strategy: Strategy,
    units: list[Vertex],
    chunks: list[Chunk],
    params: WindowParams | None = None,
) -> ContextWindow:
    """Bundle the selected units and chunks into a rendered window."""
    budget = window_quotas(strategy.semantic_depth, params)
    return ContextWindow(
        units=list(units),
        chunks=list(chunks),
        rendered=render_context(units, chunks),
        budget=budget,
    )


def parse_reply(text: str) -> tuple[str, str, bool]:
    """Split a reply into thought and answer segments.

    Returns (thought, answer, marker_found); without an "Answer:" marker
    the whole reply is the answer.
    """
    before, marker, after = text.partition("Answer:")
    if not marker:
        return "", text.strip(), False
    thought = before.strip()
    if thought.startswith("Thought:"):
        thought = thought[len("Thought:") :].strip()
    return thought, after.strip(), True


def answer(
    query: str,
    window: ContextWindow,
    gateway: Gateway,
    mode: str = "brief",
) -> AnswerResult:
    """Ask the gateway for an answer grounded in the rendered context."""
    if mode not in ("brief", "detailed"):
        raise ValueError(f"answer mode must be brief or detailed, got {mode!r}")
    template = load_prompt("answer_brief" if mode == "brief" else "answer_detailed")
    content = template.format(info=window.rendered, query=query)
    result = gateway.chat([{"role": "user", "content": content}])
    thought, final, marker_found = parse_reply(result.text)
    if mode == "brief" and not marker_found:
        logger.warning("reply carried no Answer: marker; using the full text")
    return AnswerResult(
        thought=thought,
        answer=final,
        prompt_tokens=result.prompt_tokens,
        completion_tokens=result.completion_tokens,
    )
