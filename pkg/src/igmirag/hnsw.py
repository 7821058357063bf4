"""Small deterministic HNSW over unit vectors keyed by string ids.

Determinism: vertices are inserted in sorted-key order, levels derive from
a per-key seeded RNG, and every tie is broken by key. Rebuilding from the
same table with the same seed reproduces the graph exactly, and the
adjacency serializes so a loaded index answers identically.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass

import numpy as np


@dataclass
class HnswParams:
    m: int = 8
    ef_construction: int = 64
    ef_search: int = 32
    seed: int = 13
    exact: bool = False

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("m must be >= 2")
        if self.ef_construction < 1 or self.ef_search < 1:
            raise ValueError("ef values must be >= 1")


class HnswIndex:
    def __init__(self, dim: int, params: HnswParams):
        self.dim = dim
        self.params = params
        self.keys: list[str] = []
        self._row: dict[str, int] = {}
        self._matrix = np.zeros((0, dim), dtype=np.float64)
        self.levels: dict[str, int] = {}
        self.neighbors: dict[str, dict[int, list[str]]] = {}
        self.entry_point: str | None = None
        self.max_level = -1

    def __len__(self) -> int:
        return len(self.keys)

    @classmethod
    def build(cls, table: dict[str, np.ndarray], dim: int, params: HnswParams) -> "HnswIndex":
        index = cls(dim, params)
        keys = sorted(table)
        if keys:
            index._matrix = np.stack([table[k] for k in keys])
            index.keys = keys
            index._row = {k: i for i, k in enumerate(keys)}
            for k in keys:
                index._insert(k)
        return index

    def _level_for(self, key: str) -> int:
        rng = random.Random(f"{self.params.seed}:{key}")
        # geometric level distribution, normalization 1/ln(m)
        u = rng.random()
        while u <= 0.0:
            u = rng.random()
        return int(-math.log(u) / math.log(self.params.m))

    def _vec(self, key: str) -> np.ndarray:
        return self._matrix[self._row[key]]

    def _dist(self, query: np.ndarray, key: str) -> float:
        return 1.0 - float(np.dot(query, self._vec(key)))

    def _search_layer(
        self, query: np.ndarray, entry_points: list[str], layer: int, ef: int
    ) -> list[tuple[float, str]]:
        visited = set(entry_points)
        candidates: list[tuple[float, str]] = []
        best: list[tuple[float, str]] = []  # max-heap via negated distance
        for ep in entry_points:
            d = self._dist(query, ep)
            heapq.heappush(candidates, (d, ep))
            heapq.heappush(best, (-d, ep))
        while candidates:
            d, cur = heapq.heappop(candidates)
            if len(best) >= ef and d > -best[0][0]:
                break
            for nb in self.neighbors[cur].get(layer, []):
                if nb in visited:
                    continue
                visited.add(nb)
                dn = self._dist(query, nb)
                if len(best) < ef or dn < -best[0][0]:
                    heapq.heappush(candidates, (dn, nb))
                    heapq.heappush(best, (-dn, nb))
                    if len(best) > ef:
                        heapq.heappop(best)
        return sorted((-nd, key) for nd, key in best)

    def _cap(self, layer: int) -> int:
        return self.params.m * 2 if layer == 0 else self.params.m

    def _insert(self, key: str) -> None:
        level = self._level_for(key)
        self.levels[key] = level
        self.neighbors[key] = {}
        if self.entry_point is None:
            self.entry_point = key
            self.max_level = level
            return
        vec = self._vec(key)
        cur = [self.entry_point]
        for lc in range(self.max_level, level, -1):
            found = self._search_layer(vec, cur, lc, 1)
            cur = [found[0][1]] if found else cur
        for lc in range(min(level, self.max_level), -1, -1):
            found = self._search_layer(vec, cur, lc, self.params.ef_construction)
            chosen = [k for _, k in found[: self._cap(lc)]]
            self.neighbors[key][lc] = list(chosen)
            for nb in chosen:
                bucket = self.neighbors[nb].setdefault(lc, [])
                bucket.append(key)
                cap = self._cap(lc)
                if len(bucket) > cap:
                    nb_vec = self._vec(nb)
                    ranked = sorted(
                        (1.0 - float(np.dot(nb_vec, self._vec(o))), o) for o in bucket
                    )
                    self.neighbors[nb][lc] = [o for _, o in ranked[:cap]]
            cur = chosen or cur
        if level > self.max_level:
            self.entry_point = key
            self.max_level = level

    def search(self, query: np.ndarray, k: int) -> list[tuple[str, float]]:
        """Top-k keys by cosine similarity (vectors are unit norm, so the
        dot product is the cosine). Ties break by ascending key."""
        query = np.asarray(query, dtype=np.float64)
        if query.shape != (self.dim,):
            raise ValueError(f"query dim {query.shape} != index dim ({self.dim},)")
        if not self.keys or k < 1:
            return []
        if self.params.exact:
            scores = self._matrix @ query
            order = sorted(range(len(self.keys)), key=lambda i: (-scores[i], self.keys[i]))
            return [(self.keys[i], float(scores[i])) for i in order[:k]]
        cur = [self.entry_point]
        for lc in range(self.max_level, 0, -1):
            found = self._search_layer(query, cur, lc, 1)
            cur = [found[0][1]] if found else cur
        found = self._search_layer(query, cur, 0, max(self.params.ef_search, k))
        return [(key, 1.0 - d) for d, key in found[:k]]

    def to_dict(self) -> dict:
        return {
            "entry_point": self.entry_point,
            "max_level": self.max_level,
            "levels": {k: self.levels[k] for k in sorted(self.levels)},
            "neighbors": {
                k: {str(l): lst for l, lst in sorted(self.neighbors[k].items())}
                for k in sorted(self.neighbors)
            },
        }

    @classmethod
    def from_dict(
        cls, d: dict, table: dict[str, np.ndarray], dim: int, params: HnswParams
    ) -> "HnswIndex":
        index = cls(dim, params)
        index.keys = sorted(d["levels"])
        if index.keys:
            index._matrix = np.stack([table[k] for k in index.keys])
        index._row = {k: i for i, k in enumerate(index.keys)}
        index.levels = {k: int(v) for k, v in d["levels"].items()}
        index.neighbors = {
            k: {int(l): list(lst) for l, lst in layers.items()}
            for k, layers in d["neighbors"].items()
        }
        index.entry_point = d["entry_point"]
        index.max_level = int(d["max_level"])
        return index
