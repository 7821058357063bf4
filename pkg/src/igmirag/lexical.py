"""Okapi BM25 over vertex display names: the keyword channel of recall.

The idf uses the +1 smoothed form, log((N - df + 0.5)/(df + 0.5) + 1),
which stays positive even when a term appears in every name; the classic
unsmoothed form goes negative on tiny stores and would zero out matches.
"""

from __future__ import annotations

import math
import re
from collections import Counter, defaultdict

_WORD_RE = re.compile(r"\w+", re.UNICODE)


def name_tokens(text: str) -> list[str]:
    return _WORD_RE.findall(text.lower())


class BM25Index:
    def __init__(self, names: dict[str, str], k1: float = 1.2, b: float = 0.75):
        self.k1 = k1
        self.b = b
        self.keys = sorted(names)
        self.doc_lengths: dict[str, int] = {}
        self.postings: dict[str, list[tuple[str, int]]] = defaultdict(list)
        for key in self.keys:
            counts = Counter(name_tokens(names[key]))
            self.doc_lengths[key] = sum(counts.values())
            for term in sorted(counts):
                self.postings[term].append((key, counts[term]))
        self.postings = dict(self.postings)
        n = len(self.keys)
        self.avgdl = (sum(self.doc_lengths.values()) / n) if n else 0.0

    @classmethod
    def from_graph(cls, graph, k1: float = 1.2, b: float = 0.75) -> "BM25Index":
        return cls({k: v.name for k, v in graph.vertices.items()}, k1=k1, b=b)

    def idf(self, term: str) -> float:
        df = len(self.postings.get(term, ()))
        n = len(self.keys)
        return math.log((n - df + 0.5) / (df + 0.5) + 1)

    def search(self, query: str, top_n: int = 20) -> list[tuple[str, float]]:
        """Ranked (key, score) pairs, descending score with ties broken by
        ascending key; only keys matching at least one query token appear.
        A query token appearing twice contributes twice, as in the
        reference Okapi formulation."""
        terms = name_tokens(query)
        if not terms or not self.keys:
            return []
        scores: dict[str, float] = defaultdict(float)
        for term in terms:
            posting = self.postings.get(term)
            if not posting:
                continue
            w = self.idf(term)
            for key, f in posting:
                dl = self.doc_lengths[key]
                denom = f + self.k1 * (1 - self.b + self.b * dl / self.avgdl)
                scores[key] += w * f * (self.k1 + 1) / denom
        ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
        return ranked[:top_n]
