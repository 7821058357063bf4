"""Approximate tokenization and greedy sentence-packed chunking.

The token rule is deliberately simple and published: a token is a word
(\\w+, Unicode-aware) or a single punctuation mark. Any monotone proxy
preserves the chunking semantics; this one keeps the build offline.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

_TOKEN_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)

# Sentence split: break after ., !, ? or newline, keeping the delimiter with
# the preceding sentence. Abbreviation handling is out of scope.
_SENTENCE_RE = re.compile(r"[^.!?\n]*[.!?\n]+|[^.!?\n]+$")


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text)


def count_tokens(text: str) -> int:
    return len(_TOKEN_RE.findall(text))


def split_sentences(text: str) -> list[str]:
    """Split into sentence-ish pieces whose concatenation equals the input."""
    if not text:
        return []
    pieces = _SENTENCE_RE.findall(text)
    # findall over this pattern is a partition: every character lands in
    # exactly one piece, so "".join(pieces) == text.
    return pieces


@dataclass
class Chunk:
    """One source-text slice. Chunks only preserve provenance; they carry
    no graph structure of their own.

    Attributes:
        id: "<title>#<ordinal>" with 0-based ordinals.
        source_title: title of the originating document.
        text: the slice text; concatenating a document's chunks restores it.
        token_count: approximate token count of text.
        keywords: high-level keywords attached during extraction (stage 3).
    """

    id: str
    source_title: str
    text: str
    token_count: int
    keywords: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "source_title": self.source_title,
            "text": self.text,
            "token_count": self.token_count,
            "keywords": list(self.keywords),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Chunk":
        return cls(
            id=d["id"],
            source_title=d["source_title"],
            text=d["text"],
            token_count=d["token_count"],
            keywords=list(d.get("keywords", [])),
        )


def chunk_document(doc: dict, chunk_tokens: int) -> list[Chunk]:
    """Greedy sequential packing of sentences, no overlap.

    Each chunk stays within chunk_tokens except that a single sentence longer
    than the limit is kept whole. Concatenation of the chunk texts equals the
    original text exactly.
    """
    title = doc.get("title", "")
    text = doc.get("text", "")
    if not text or count_tokens(text) == 0:
        raise ValueError("empty document")
    if chunk_tokens < 1:
        raise ValueError("chunk_tokens must be positive")

    sentences = split_sentences(text)
    chunks: list[Chunk] = []
    current: list[str] = []
    current_tokens = 0

    def flush():
        nonlocal current, current_tokens
        if current:
            body = "".join(current)
            chunks.append(
                Chunk(
                    id=f"{title}#{len(chunks)}",
                    source_title=title,
                    text=body,
                    token_count=count_tokens(body),
                )
            )
            current = []
            current_tokens = 0

    for sentence in sentences:
        n = count_tokens(sentence)
        if current and current_tokens + n > chunk_tokens:
            flush()
        # An over-long single sentence still lands here and is kept whole.
        current.append(sentence)
        current_tokens += n
    flush()
    return chunks
