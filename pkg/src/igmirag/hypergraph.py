"""Hierarchical heterogeneous hypergraph store.

Three vertex layers share one vertex table:

- layer 1: entities (no members)
- layer 2: pairwise relations (exactly 2 member entities)
- layer 3: multi-entity associations (2 or more member entities)

Hyperedges are implicit in the members lists (layer-2/3 vertex to its
entities); chunk provenance edges are implicit in each vertex's chunk_ids.
Chunks never participate in diffusion.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path

from .errors import CorruptStore, InvariantViolation
from .tokens import Chunk

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1

KEY_SEPARATOR = "⊕"  # joins sorted names inside a canonical key


class Layer(IntEnum):
    ENTITY = 1
    PAIR_RELATION = 2
    MULTI_ASSOCIATION = 3


def canonical_key(layer: int, names: list[str]) -> str:
    """Build the canonical vertex key for a layer and its defining names.

    Names are casefolded, trimmed, sorted lexicographically and joined, so
    the key is a pure function of the name set and insensitive to member
    order for layers 2 and 3.

    Examples:
        >>> canonical_key(2, ["Francis Bacon", "George Dyer"])
        '2|francis bacon⊕george dyer'
        >>> canonical_key(1, ["Head I"])
        '1|head i'
    """
    if not names:
        raise ValueError("names must be nonempty")
    layer = int(layer)
    if layer == 1 and len(names) != 1:
        raise ValueError("layer 1 keys take exactly one name")
    if layer == 2 and len(names) != 2:
        raise ValueError("layer 2 keys take exactly two names")
    if layer == 3 and len(names) < 2:
        raise ValueError("layer 3 keys take two or more names")
    normalized = sorted(n.strip().casefold() for n in names)
    return f"{layer}|" + KEY_SEPARATOR.join(normalized)


@dataclass
class Vertex:
    """One knowledge unit: an entity, a pairwise relation, or an association.

    Attributes:
        key: canonical id (see canonical_key).
        layer: 1, 2 or 3.
        name: display name; for layers 2/3 the angle-bracketed member listing
            in first-seen order.
        description: free-text semantic description; merged descriptions are
            newline-joined.
        attributes: additional information strings (may include "Same Entity"
            on alias pairs).
        members: sorted entity keys (empty for layer 1, length 2 for layer 2,
            2 or more for layer 3).
        chunk_ids: ids of the chunks this unit was extracted from.
    """

    key: str
    layer: Layer
    name: str
    description: str = ""
    attributes: list[str] = field(default_factory=list)
    members: list[str] = field(default_factory=list)
    chunk_ids: set[str] = field(default_factory=set)

    def validate(self) -> None:
        n = len(self.members)
        if self.layer == Layer.ENTITY and n != 0:
            raise InvariantViolation(f"{self.key}: layer-1 vertex with members")
        if self.layer == Layer.PAIR_RELATION and n != 2:
            raise InvariantViolation(f"{self.key}: layer-2 vertex with {n} members")
        if self.layer == Layer.MULTI_ASSOCIATION and n < 2:
            raise InvariantViolation(f"{self.key}: layer-3 vertex with {n} members")

    def to_dict(self) -> dict:
        return {
            "key": self.key,
            "layer": int(self.layer),
            "name": self.name,
            "description": self.description,
            "attributes": list(self.attributes),
            "members": list(self.members),
            "chunk_ids": sorted(self.chunk_ids),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Vertex":
        return cls(
            key=d["key"],
            layer=Layer(d["layer"]),
            name=d["name"],
            description=d.get("description", ""),
            attributes=list(d.get("attributes", [])),
            members=list(d.get("members", [])),
            chunk_ids=set(d.get("chunk_ids", [])),
        )


class Hypergraph:
    """In-memory store with a single writer during indexing.

    After build or load the graph is treated as immutable; reads are safe
    from any number of threads.
    """

    def __init__(self):
        self.vertices: dict[str, Vertex] = {}
        self.chunks: dict[str, Chunk] = {}
        # backward incidence: entity key -> sorted list of containing layer-2/3 keys
        self._containing: dict[str, list[str]] = {}

    # -- mutation (indexing phase) -------------------------------------------

    def add_chunk(self, chunk: Chunk) -> None:
        self.chunks[chunk.id] = chunk

    def upsert_vertex(self, v: Vertex) -> str:
        """Insert v, or merge it into the existing vertex with the same key.

        Merge policy: descriptions concatenated with a newline, attributes
        unioned preserving first-seen order, chunk ids unioned. The existing
        display name wins.
        """
        v.validate()
        for m in v.members:
            if m not in self.vertices or self.vertices[m].layer != Layer.ENTITY:
                raise InvariantViolation(f"{v.key}: member {m!r} is not a stored entity")
        existing = self.vertices.get(v.key)
        if existing is None:
            self.vertices[v.key] = Vertex(
                key=v.key,
                layer=v.layer,
                name=v.name,
                description=v.description,
                attributes=list(v.attributes),
                members=sorted(v.members),
                chunk_ids=set(v.chunk_ids),
            )
            for m in v.members:
                bucket = self._containing.setdefault(m, [])
                if v.key not in bucket:
                    bucket.append(v.key)
                    bucket.sort()
        else:
            if existing.layer != v.layer or existing.members != sorted(v.members):
                raise InvariantViolation(f"{v.key}: conflicting layer or members on merge")
            if v.description and v.description not in existing.description.split("\n"):
                existing.description = (
                    existing.description + "\n" + v.description
                    if existing.description
                    else v.description
                )
            for a in v.attributes:
                if a not in existing.attributes:
                    existing.attributes.append(a)
            existing.chunk_ids |= v.chunk_ids
        return v.key

    # -- reads ----------------------------------------------------------------

    def vertex_layer(self, key: str) -> Layer:
        v = self.vertices.get(key)
        if v is None:
            raise KeyError(key)
        return v.layer

    def layer_filtered_neighbors(self, key: str, direction: str) -> list[str]:
        """Deductive neighbors of a vertex along one direction.

        forward: a layer-2/3 vertex yields its member entities; entities have
        no forward targets. backward: an entity yields every layer-2/3 vertex
        containing it; layer-2/3 vertices have no backward targets. Results
        are sorted by key.
        """
        v = self.vertices.get(key)
        if v is None:
            raise KeyError(key)
        if direction == "forward":
            return list(v.members) if v.layer != Layer.ENTITY else []
        if direction == "backward":
            if v.layer == Layer.ENTITY:
                return list(self._containing.get(key, []))
            return []
        raise ValueError(f"unknown direction {direction!r}")

    def chunk_degree(self, key: str) -> int:
        v = self.vertices.get(key)
        if v is None:
            raise KeyError(key)
        return len(v.chunk_ids)

    def layer_keys(self, layer: int) -> list[str]:
        return sorted(k for k, v in self.vertices.items() if int(v.layer) == int(layer))

    def counts(self) -> dict:
        return {
            "entities": sum(1 for v in self.vertices.values() if v.layer == Layer.ENTITY),
            "pairs": sum(1 for v in self.vertices.values() if v.layer == Layer.PAIR_RELATION),
            "associations": sum(
                1 for v in self.vertices.values() if v.layer == Layer.MULTI_ASSOCIATION
            ),
            "chunks": len(self.chunks),
        }

    def validate(self) -> None:
        """Check the structural invariants; raise InvariantViolation on the first break."""
        for v in self.vertices.values():
            v.validate()
            for m in v.members:
                member = self.vertices.get(m)
                if member is None or member.layer != Layer.ENTITY:
                    raise InvariantViolation(f"{v.key}: dangling member {m!r}")
            for c in v.chunk_ids:
                if c not in self.chunks:
                    raise InvariantViolation(f"{v.key}: unknown chunk {c!r}")

    # -- persistence ------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "chunks": {cid: c.to_dict() for cid, c in self.chunks.items()},
            "vertices": {k: v.to_dict() for k, v in self.vertices.items()},
        }

    def save(self, path: str | Path) -> None:
        self.validate()
        payload = json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False)
        Path(path).write_text(payload + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Hypergraph":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise CorruptStore(f"cannot read store {path}: {exc}") from exc
        if not isinstance(raw, dict) or raw.get("format_version") != FORMAT_VERSION:
            raise CorruptStore(f"unsupported store format in {path}")
        g = cls()
        try:
            for cid, cd in raw.get("chunks", {}).items():
                g.chunks[cid] = Chunk.from_dict(cd)
            # Entities first so member references resolve during upsert.
            vertices = [Vertex.from_dict(vd) for vd in raw.get("vertices", {}).values()]
            vertices.sort(key=lambda v: (int(v.layer), v.key))
            for v in vertices:
                g.upsert_vertex(v)
            g.validate()
        except (KeyError, TypeError, InvariantViolation) as exc:
            raise CorruptStore(f"invalid store content in {path}: {exc}") from exc
        return g
