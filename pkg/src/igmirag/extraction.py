"""Corpus ingestion: chunk documents, run the four-stage extraction
conversation against the gateway, and populate the hypergraph.

The four stages (entities, pairwise relations, high-level keywords,
high-order associations) are issued as one multi-turn conversation per
chunk because the later prompts refer back to "Step 1" results.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .errors import BuildFailure, ExtractionFailure
from .hypergraph import Hypergraph, Layer, Vertex, canonical_key
from .prompts import load_prompt
from .tokens import Chunk, chunk_document

logger = logging.getLogger(__name__)

STAGES = (
    "extract_entities",
    "extract_pair_relations",
    "extract_keywords",
    "extract_associations",
)


@dataclass
class ExtractionResult:
    """Parsed and repaired output of one chunk's extraction conversation."""

    entities: list[dict] = field(default_factory=list)
    pairs: list[dict] = field(default_factory=list)
    keywords: list[str] = field(default_factory=list)
    associations: list[dict] = field(default_factory=list)


def _first_bracketed_block(text: str) -> str | None:
    """Return the first balanced [...] or {...} substring, or None."""
    start = None
    for i, ch in enumerate(text):
        if ch in "[{":
            start = i
            break
    if start is None:
        return None
    openers = {"[": "]", "{": "}"}
    closer = openers[text[start]]
    opener = text[start]
    depth = 0
    in_string = False
    escaped = False
    for i in range(start, len(text)):
        ch = text[i]
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == opener:
            depth += 1
        elif ch == closer:
            depth -= 1
            if depth == 0:
                return text[start : i + 1]
    return None


def parse_json_reply(text: str):
    """Parse an LLM reply as JSON, tolerating markdown fences and prose
    around the first bracketed block. Raises ValueError when nothing parses."""
    cleaned = text.strip()
    if cleaned.startswith("```"):
        lines = cleaned.splitlines()
        lines = lines[1:]
        if lines and lines[-1].strip().startswith("```"):
            lines = lines[:-1]
        cleaned = "\n".join(lines).strip()
    try:
        return json.loads(cleaned)
    except json.JSONDecodeError:
        pass
    block = _first_bracketed_block(cleaned)
    if block is not None:
        try:
            return json.loads(block)
        except json.JSONDecodeError:
            pass
    raise ValueError("reply contains no parseable JSON value")


def _as_str_list(value) -> list[str]:
    if value is None:
        return []
    if isinstance(value, str):
        value = [value]
    if not isinstance(value, list):
        value = [value]
    return [str(x).strip() for x in value if str(x).strip()]


def _coerce_entities(value) -> list[dict]:
    if isinstance(value, dict):
        value = value.get("entities", [value])
    if not isinstance(value, list):
        raise ValueError("entity reply is not a list")
    out = []
    for item in value:
        if not isinstance(item, dict) or not str(item.get("entity_name", "")).strip():
            logger.warning("skipping malformed entity record: %r", item)
            continue
        out.append(
            {
                "name": str(item["entity_name"]).strip(),
                "description": str(item.get("entity_description", "")).strip(),
                "attributes": _as_str_list(item.get("attribute", item.get("attributes"))),
            }
        )
    return out


def _coerce_keywords(value) -> list[str]:
    if isinstance(value, dict):
        value = value.get("high_level_keywords", [])
    if not isinstance(value, list):
        raise ValueError("keyword reply is not a list")
    out: list[str] = []
    for item in value:
        if isinstance(item, dict):
            out.extend(_as_str_list(item.get("high_level_keywords")))
        else:
            out.extend(_as_str_list(item))
    deduped = []
    for kw in out:
        if kw not in deduped:
            deduped.append(kw)
    return deduped


def _coerce_relations(value, member_field: str) -> list[dict]:
    if isinstance(value, dict):
        value = [value]
    if not isinstance(value, list):
        raise ValueError(f"{member_field} reply is not a list")
    out = []
    for item in value:
        if not isinstance(item, dict) or not isinstance(item.get(member_field), list):
            logger.warning("skipping malformed relation record: %r", item)
            continue
        out.append(
            {
                "member_names": [str(m) for m in item[member_field]],
                "description": str(item.get("relationship_description", "")).strip(),
                "attributes": _as_str_list(item.get("attribute", item.get("attributes"))),
            }
        )
    return out


def repair_member(raw: str, entity_names: list[str]) -> str | None:
    """Map a member name back onto a stage-1 entity name: exact
    case-insensitive match first, then substring containment in either
    direction. First match in reply order wins; no match returns None."""
    target = raw.casefold().strip()
    if not target:
        return None
    for name in entity_names:
        if name.casefold().strip() == target:
            return name
    for name in entity_names:
        folded = name.casefold().strip()
        if target in folded or folded in target:
            return name
    return None


def _repair_records(
    records: list[dict],
    entity_names: list[str],
    exact: int | None = None,
    minimum: int = 2,
) -> list[dict]:
    kept = []
    for rec in records:
        members: list[str] = []
        seen: set[str] = set()
        for raw in rec["member_names"]:
            fixed = repair_member(raw, entity_names)
            if fixed is None:
                logger.warning("dropping irreparable member %r", raw)
                continue
            if fixed.casefold() not in seen:
                seen.add(fixed.casefold())
                members.append(fixed)
        if exact is not None and len(members) != exact:
            logger.warning("dropping relation, needs %d members: %r", exact, rec["member_names"])
            continue
        if len(members) < minimum:
            logger.warning("dropping relation, needs >=%d members: %r", minimum, rec["member_names"])
            continue
        kept.append({**rec, "member_names": members})
    return kept


_COERCERS = {
    "extract_entities": _coerce_entities,
    "extract_pair_relations": lambda v: _coerce_relations(v, "entities_pair"),
    "extract_keywords": _coerce_keywords,
    "extract_associations": lambda v: _coerce_relations(v, "entities_set"),
}


def extract_knowledge(chunk: Chunk, gateway, retries: int = 2) -> ExtractionResult:
    """Run the four-stage conversation for one chunk. A stage whose reply
    stays unparseable after `retries` re-asks raises ExtractionFailure with
    the raw reply attached. Stage-3 keywords are written onto the chunk."""
    conversation: list[dict] = []
    parsed: dict[str, object] = {}
    for stage in STAGES:
        template = load_prompt(stage)
        if stage == "extract_entities":
            content = f"{template}\n\n---Text---\nTitle: {chunk.source_title}\n{chunk.text}"
        else:
            content = template
        message = {"role": "user", "content": content}
        reply_text = ""
        value = None
        for attempt in range(retries + 1):
            reply_text = gateway.chat(conversation + [message]).text
            try:
                value = _COERCERS[stage](parse_json_reply(reply_text))
                break
            except ValueError as exc:
                logger.warning(
                    "chunk %s stage %s attempt %d unparseable: %s",
                    chunk.id,
                    stage,
                    attempt + 1,
                    exc,
                )
        else:
            raise ExtractionFailure(
                f"chunk {chunk.id}: stage {stage} unparseable after {retries} retries",
                raw_reply=reply_text,
            )
        conversation.append(message)
        conversation.append({"role": "assistant", "content": reply_text})
        parsed[stage] = value

    entities = parsed["extract_entities"]
    names = [e["name"] for e in entities]
    pairs = _repair_records(parsed["extract_pair_relations"], names, exact=2)
    associations = _repair_records(parsed["extract_associations"], names, minimum=2)
    keywords = parsed["extract_keywords"]
    chunk.keywords = list(keywords)
    return ExtractionResult(
        entities=entities, pairs=pairs, keywords=keywords, associations=associations
    )


def apply_extraction(graph: Hypergraph, chunk: Chunk, result: ExtractionResult) -> None:
    """Upsert one chunk's extraction: entities first so relation members
    always resolve, then pairs, then associations."""
    for ent in result.entities:
        graph.upsert_vertex(
            Vertex(
                key=canonical_key(1, [ent["name"]]),
                layer=Layer.ENTITY,
                name=ent["name"],
                description=ent["description"],
                attributes=list(ent["attributes"]),
                members=[],
                chunk_ids={chunk.id},
            )
        )
    for rec in result.pairs:
        _upsert_relation(graph, chunk, rec, Layer.PAIR_RELATION)
    for rec in result.associations:
        _upsert_relation(graph, chunk, rec, Layer.MULTI_ASSOCIATION)


def _upsert_relation(graph: Hypergraph, chunk: Chunk, rec: dict, layer: Layer) -> None:
    names = rec["member_names"]
    graph.upsert_vertex(
        Vertex(
            key=canonical_key(int(layer), names),
            layer=layer,
            name="<" + ", ".join(names) + ">",
            description=rec["description"],
            attributes=list(rec["attributes"]),
            members=[canonical_key(1, [n]) for n in names],
            chunk_ids={chunk.id},
        )
    )


def load_corpus(path: str | Path) -> list[dict]:
    """A corpus is a directory of UTF-8 .txt files (title = file stem) or a
    JSON-lines file of {title, text} records."""
    p = Path(path)
    if p.is_dir():
        return [
            {"title": f.stem, "text": f.read_text(encoding="utf-8")}
            for f in sorted(p.glob("*.txt"))
        ]
    docs = []
    for line in p.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line:
            rec = json.loads(line)
            docs.append({"title": rec["title"], "text": rec["text"]})
    return docs


@dataclass
class BuildResult:
    graph: Hypergraph
    df_index: object
    lexical: object
    stats: dict
    failures: list[tuple[str, str]] = field(default_factory=list)


def build_index(corpus: list[dict], config, gateway, store_dir: str | Path | None = None) -> BuildResult:
    """Chunk every document, extract knowledge per chunk, populate the graph,
    build the semantic and lexical indexes, and optionally persist the store.

    A chunk whose extraction fails is recorded and skipped; zero successful
    chunks raise BuildFailure. Extraction may run in parallel, but upserts
    are applied in chunk-ordinal order so the store is deterministic.
    """
    from .dfindex import DFIndex
    from .lexical import BM25Index

    docs = list(corpus)
    if not docs:
        raise BuildFailure("empty corpus")
    tokens_before = gateway.ledger.total

    chunks: list[Chunk] = []
    for doc in docs:
        chunks.extend(chunk_document(doc, config.chunking.chunk_tokens))

    results: list[ExtractionResult | None] = [None] * len(chunks)
    failure_by_index: dict[int, str] = {}

    def run(i: int) -> None:
        try:
            results[i] = extract_knowledge(chunks[i], gateway)
        except ExtractionFailure as exc:
            failure_by_index[i] = str(exc)
            logger.error("skipping chunk %s: %s", chunks[i].id, exc)

    width = config.chunking.parallel_width
    if width > 1:
        with ThreadPoolExecutor(max_workers=width) as pool:
            list(pool.map(run, range(len(chunks))))
    else:
        for i in range(len(chunks)):
            run(i)

    graph = Hypergraph()
    for ch in chunks:
        graph.add_chunk(ch)
    successes = 0
    for ch, res in zip(chunks, results):
        if res is None:
            continue
        apply_extraction(graph, ch, res)
        successes += 1
    if successes == 0:
        raise BuildFailure("no chunk extracted successfully")
    graph.validate()

    df_index = DFIndex.build(graph, gateway, config.hnsw, config.quotas)
    lexical = BM25Index.from_graph(graph, k1=config.lexical.k1, b=config.lexical.b)
    failures = [(chunks[i].id, failure_by_index[i]) for i in sorted(failure_by_index)]
    stats = {
        **graph.counts(),
        "tokens": gateway.ledger.total - tokens_before,
        "failed_chunks": len(failures),
    }
    result = BuildResult(graph, df_index, lexical, stats, failures)
    if store_dir is not None:
        save_store(result, store_dir)
    return result


GRAPH_FILE = "graph.hhhg"
VECTOR_FILE = "vectors.dfidx"
STATS_FILE = "stats.json"


def save_store(result: BuildResult, store_dir: str | Path) -> None:
    store = Path(store_dir)
    store.mkdir(parents=True, exist_ok=True)
    result.graph.save(store / GRAPH_FILE)
    result.df_index.save(store / VECTOR_FILE)
    payload = json.dumps(result.stats, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    (store / STATS_FILE).write_text(payload, encoding="utf-8")
