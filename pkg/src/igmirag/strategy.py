"""Retrieval-strategy parsing: one gateway call turns the user's question
into the knobs that drive retrieval (rewritten question, key entities with
aliases, keywords, target layer, matching score, semantic depth)."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

from .errors import ParseFailure
from .hypergraph import Layer
from .prompts import load_prompt

logger = logging.getLogger(__name__)

FIELD_NAMES = (
    "question",
    "rewrite_question",
    "key_entities",
    "keywords",
    "target_layer",
    "matching_score",
    "semantic_depth",
)

MANDATORY_FIELDS = ("rewrite_question", "target_layer", "matching_score", "semantic_depth")

_LABEL_RE = re.compile(
    r"^\s*[-*]?\s*(?:\d+\s*\.\s*)?(" + "|".join(FIELD_NAMES) + r")\s*[::]\s*(.*)$",
    re.IGNORECASE,
)


@dataclass
class Strategy:
    question: str
    rewrite_question: str
    key_entities: list[dict] = field(default_factory=list)
    keywords: list[str] = field(default_factory=list)
    target_layer: Layer = Layer.ENTITY
    matching_score: int = 3
    semantic_depth: int = 2

    def validate(self) -> None:
        if not self.rewrite_question.strip():
            raise ValueError("rewrite_question must be nonempty")
        if int(self.target_layer) not in (1, 2, 3):
            raise ValueError(f"target_layer out of range: {self.target_layer}")
        if not 1 <= self.matching_score <= 5:
            raise ValueError(f"matching_score out of range: {self.matching_score}")
        if not 1 <= self.semantic_depth <= 5:
            raise ValueError(f"semantic_depth out of range: {self.semantic_depth}")


def _parse_labeled_fields(reply: str) -> dict[str, str]:
    """Collect `name: value` lines; unlabeled lines continue the previous
    field so multi-line rewrites survive."""
    fields: dict[str, str] = {}
    current: str | None = None
    for line in reply.splitlines():
        match = _LABEL_RE.match(line)
        if match:
            current = match.group(1).lower()
            fields[current] = match.group(2).strip()
        elif current and line.strip():
            fields[current] = (fields[current] + " " + line.strip()).strip()
    return fields


def _parse_key_entities(value: str) -> list[dict]:
    value = value.strip()
    if value.startswith("[") and value.endswith("]"):
        value = value[1:-1]
    entities = []
    for group in value.split(","):
        parts = [p.strip() for p in group.split("|")]
        parts = [p for p in parts if p]
        if parts:
            entities.append({"canonical": parts[0], "aliases": parts[1:]})
    return entities


def _parse_terms(value: str) -> list[str]:
    value = value.strip()
    if value.startswith("[") and value.endswith("]"):
        value = value[1:-1]
    return [t.strip() for t in value.split(",") if t.strip()]


def _first_int(value: str) -> int | None:
    match = re.search(r"-?\d+", value)
    return int(match.group()) if match else None


def _clamp(value: int, lo: int, hi: int, name: str) -> int:
    if value < lo or value > hi:
        clamped = min(max(value, lo), hi)
        logger.warning("%s=%d out of range, clamped to %d", name, value, clamped)
        return clamped
    return value


def parse_strategy(query: str, gateway, retries: int = 2) -> Strategy:
    """Issue the architecture + goal prompt and parse the labeled reply.

    Out-of-range integers are clamped with a warning. A reply still missing
    a mandatory field after `retries` re-asks raises ParseFailure; the
    engine downgrades that to default knobs.
    """
    if not query.strip():
        raise ValueError("query must be nonempty")
    content = "{}\n{}\n---Question---\n{}".format(
        load_prompt("strategy_architecture"), load_prompt("strategy_goal"), query
    )
    messages = [{"role": "user", "content": content}]
    problem = "no reply"
    for attempt in range(retries + 1):
        reply = gateway.chat(messages).text
        fields = _parse_labeled_fields(reply)
        missing = [name for name in MANDATORY_FIELDS if not fields.get(name, "").strip()]
        ints = {
            name: _first_int(fields.get(name, ""))
            for name in ("target_layer", "matching_score", "semantic_depth")
        }
        missing.extend(name for name, v in ints.items() if v is None and name not in missing)
        if missing:
            problem = f"missing fields: {', '.join(sorted(set(missing)))}"
            logger.warning("strategy reply attempt %d: %s", attempt + 1, problem)
            continue
        strategy = Strategy(
            question=fields.get("question", "").strip() or query,
            rewrite_question=fields["rewrite_question"],
            key_entities=_parse_key_entities(fields.get("key_entities", "")),
            keywords=_parse_terms(fields.get("keywords", "")),
            target_layer=Layer(_clamp(ints["target_layer"], 1, 3, "target_layer")),
            matching_score=_clamp(ints["matching_score"], 1, 5, "matching_score"),
            semantic_depth=_clamp(ints["semantic_depth"], 1, 5, "semantic_depth"),
        )
        strategy.validate()
        return strategy
    raise ParseFailure(f"strategy unparseable after {retries} retries: {problem}")


def fallback_strategy(query: str) -> Strategy:
    """Defaults used when parsing fails: entity layer, mid matching score,
    shallow depth. Keeps the query answerable at bounded cost."""
    return Strategy(
        question=query,
        rewrite_question=query,
        key_entities=[],
        keywords=[],
        target_layer=Layer.ENTITY,
        matching_score=3,
        semantic_depth=2,
    )


def composite_query(s: Strategy) -> str:
    """Space-joined concatenation of canonical names, aliases and keywords,
    deduplicated case-sensitively with first occurrence preserved."""
    terms: list[str] = []
    for ke in s.key_entities:
        terms.append(ke["canonical"])
        terms.extend(ke["aliases"])
    terms.extend(s.keywords)
    seen: set[str] = set()
    out = []
    for term in terms:
        if term and term not in seen:
            seen.add(term)
            out.append(term)
    return " ".join(out)
