"""Dual-focus semantic index: one global HNSW over every vertex description
plus one per-layer HNSW, searched with an m-dependent quota split between
the two. The global list comes first and local hits are appended after it,
deduplicated with first occurrence winning.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import BuildFailure, CorruptStore
from .hnsw import HnswIndex, HnswParams

DFIDX_FORMAT_VERSION = 1

EMBED_BATCH = 64


@dataclass
class QuotaParams:
    k_b: int = 12
    k_min: int = 5
    k_max: int = 20

    def __post_init__(self):
        if self.k_b < 1:
            raise ValueError("k_b must be >= 1")
        if self.k_min > self.k_max:
            raise ValueError("k_min must be <= k_max")


def quotas(m: int, k_b: int = 12, k_min: int = 5, k_max: int = 20) -> tuple[int, int]:
    """Global/local result quotas for a matching score m.

    k_G = min(ceil((1 - m/6) * k_b) + k_min, k_max) and
    k_L = floor((m/6) * k_b), both in exact integer arithmetic.

    >>> quotas(4)
    (9, 8)
    >>> quotas(5)
    (7, 10)
    >>> quotas(1)
    (15, 2)
    """
    if not 1 <= m <= 5:
        raise ValueError(f"matching score must be in [1,5], got {m}")
    QuotaParams(k_b=k_b, k_min=k_min, k_max=k_max)
    k_g = min(-(-((6 - m) * k_b) // 6) + k_min, k_max)
    k_l = (m * k_b) // 6
    return k_g, k_l


@dataclass
class EmbeddingTable:
    dim: int
    vectors: dict[str, np.ndarray] = field(default_factory=dict)

    def validate(self) -> None:
        for key, vec in self.vectors.items():
            if vec.shape != (self.dim,):
                raise BuildFailure(f"vector for {key} has dim {vec.shape}, expected {self.dim}")
            norm = float(np.linalg.norm(vec))
            if abs(norm - 1.0) > 1e-6:
                raise BuildFailure(f"vector for {key} is not unit norm ({norm})")

    def to_dict(self) -> dict:
        return {k: self.vectors[k].tolist() for k in sorted(self.vectors)}

    @classmethod
    def from_dict(cls, dim: int, d: dict) -> "EmbeddingTable":
        return cls(dim=dim, vectors={k: np.asarray(v, dtype=np.float64) for k, v in d.items()})


def _layer_of(key: str) -> int:
    return int(key.split("|", 1)[0])


class DFIndex:
    def __init__(
        self,
        table: EmbeddingTable,
        global_index: HnswIndex,
        local_indexes: dict[int, HnswIndex],
        hnsw_params: HnswParams,
        quota_params: QuotaParams,
    ):
        self.table = table
        self.global_index = global_index
        self.local_indexes = local_indexes
        self.hnsw_params = hnsw_params
        self.quota_params = quota_params

    @classmethod
    def from_table(
        cls,
        table: EmbeddingTable,
        hnsw_params: HnswParams | None = None,
        quota_params: QuotaParams | None = None,
    ) -> "DFIndex":
        if not table.vectors:
            raise BuildFailure("cannot build a dual-focus index from zero vectors")
        table.validate()
        hnsw_params = hnsw_params or HnswParams()
        quota_params = quota_params or QuotaParams()
        global_index = HnswIndex.build(table.vectors, table.dim, hnsw_params)
        local_indexes = {}
        for layer in (1, 2, 3):
            subset = {k: v for k, v in table.vectors.items() if _layer_of(k) == layer}
            local_indexes[layer] = HnswIndex.build(subset, table.dim, hnsw_params)
        return cls(table, global_index, local_indexes, hnsw_params, quota_params)

    @classmethod
    def build(
        cls,
        graph,
        gateway,
        hnsw_params: HnswParams | None = None,
        quota_params: QuotaParams | None = None,
    ) -> "DFIndex":
        """Embed every vertex description (falling back to the name when the
        description is empty) in sorted-key order and index the vectors."""
        keys = sorted(graph.vertices)
        if not keys:
            raise BuildFailure("cannot index an empty graph")
        texts = [graph.vertices[k].description or graph.vertices[k].name for k in keys]
        vectors: list[np.ndarray] = []
        for i in range(0, len(texts), EMBED_BATCH):
            vectors.extend(gateway.embed(texts[i : i + EMBED_BATCH]))
        table = EmbeddingTable(dim=int(vectors[0].shape[0]), vectors=dict(zip(keys, vectors)))
        return cls.from_table(table, hnsw_params, quota_params)

    def search(self, query_vec: np.ndarray, target_layer: int, m: int) -> list[str]:
        """The dual-focus candidate ranking: top-k_G global hits followed by
        top-k_L hits from the target layer's subindex, deduplicated with the
        first (global) occurrence keeping its rank."""
        if int(target_layer) not in (1, 2, 3):
            raise ValueError(f"target layer must be 1, 2 or 3, got {target_layer}")
        k_g, k_l = quotas(
            m, self.quota_params.k_b, self.quota_params.k_min, self.quota_params.k_max
        )
        ranked = self.global_index.search(query_vec, k_g)
        local = self.local_indexes.get(int(target_layer))
        local_ranked = local.search(query_vec, k_l) if local is not None and len(local) else []
        out: list[str] = []
        seen: set[str] = set()
        for key, _ in [*ranked, *local_ranked]:
            if key not in seen:
                seen.add(key)
                out.append(key)
        return out

    def save(self, path: str | Path) -> None:
        payload = {
            "format_version": DFIDX_FORMAT_VERSION,
            "dim": self.table.dim,
            "hnsw": {
                "m": self.hnsw_params.m,
                "ef_construction": self.hnsw_params.ef_construction,
                "ef_search": self.hnsw_params.ef_search,
                "seed": self.hnsw_params.seed,
                "exact": self.hnsw_params.exact,
            },
            "quotas": {
                "k_b": self.quota_params.k_b,
                "k_min": self.quota_params.k_min,
                "k_max": self.quota_params.k_max,
            },
            "vectors": self.table.to_dict(),
            "graphs": {
                "global": self.global_index.to_dict(),
                "1": self.local_indexes[1].to_dict(),
                "2": self.local_indexes[2].to_dict(),
                "3": self.local_indexes[3].to_dict(),
            },
        }
        text = json.dumps(payload, sort_keys=True, ensure_ascii=False) + "\n"
        Path(path).write_text(text, encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "DFIndex":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise CorruptStore(f"cannot read index file {path}: {exc}") from exc
        if not isinstance(raw, dict) or raw.get("format_version") != DFIDX_FORMAT_VERSION:
            raise CorruptStore(f"unsupported index format in {path}")
        try:
            hnsw_params = HnswParams(**raw["hnsw"])
            quota_params = QuotaParams(**raw["quotas"])
            table = EmbeddingTable.from_dict(int(raw["dim"]), raw["vectors"])
            table.validate()
            graphs = raw["graphs"]
            global_index = HnswIndex.from_dict(
                graphs["global"], table.vectors, table.dim, hnsw_params
            )
            local_indexes = {
                layer: HnswIndex.from_dict(
                    graphs[str(layer)],
                    {k: v for k, v in table.vectors.items() if _layer_of(k) == layer},
                    table.dim,
                    hnsw_params,
                )
                for layer in (1, 2, 3)
            }
        except (KeyError, TypeError, ValueError, BuildFailure) as exc:
            raise CorruptStore(f"malformed index file {path}: {exc}") from exc
        return cls(table, global_index, local_indexes, hnsw_params, quota_params)
