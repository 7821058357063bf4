import pytest
from hypothesis import given, strategies as st

from igmirag.tokens import Chunk, chunk_document, count_tokens, split_sentences, tokenize


def test_tokenize_words_and_punctuation():
    assert tokenize("Head I, 1948.") == ["Head", "I", ",", "1948", "."]


def test_tokenize_unicode_words():
    assert tokenize("Albrecht Dürer") == ["Albrecht", "Dürer"]


def test_count_tokens_empty():
    assert count_tokens("") == 0
    assert count_tokens("   \n  ") == 0


def test_split_sentences_partition():
    text = "One. Two! Three? Four\nFive"
    pieces = split_sentences(text)
    assert "".join(pieces) == text
    assert len(pieces) == 5


@given(st.text(max_size=400))
def test_split_sentences_always_partitions(text):
    assert "".join(split_sentences(text)) == text


def test_chunk_document_respects_limit():
    text = " ".join(f"Sentence number {i} stops here." for i in range(40))
    chunks = chunk_document({"title": "T", "text": text}, chunk_tokens=30)
    assert len(chunks) > 1
    for chunk in chunks:
        assert chunk.token_count <= 30
    assert "".join(c.text for c in chunks) == text
    assert [c.id for c in chunks] == [f"T#{i}" for i in range(len(chunks))]


def test_chunk_document_single_chunk_when_under_limit():
    chunks = chunk_document({"title": "T", "text": "Short text."}, chunk_tokens=100)
    assert len(chunks) == 1
    assert chunks[0].text == "Short text."


def test_chunk_document_keeps_overlong_sentence_whole():
    long_sentence = "word " * 50 + "end."
    chunks = chunk_document({"title": "T", "text": long_sentence}, chunk_tokens=10)
    assert any(c.token_count > 10 for c in chunks)
    assert "".join(c.text for c in chunks) == long_sentence


def test_chunk_document_rejects_empty():
    with pytest.raises(ValueError):
        chunk_document({"title": "T", "text": ""}, chunk_tokens=10)
    with pytest.raises(ValueError):
        chunk_document({"title": "T", "text": "ok."}, chunk_tokens=0)


@given(st.integers(min_value=1, max_value=200))
def test_chunk_document_concatenation_invariant(limit):
    text = "Alpha beta gamma. Delta epsilon! Zeta eta theta? Iota kappa."
    chunks = chunk_document({"title": "X", "text": text}, chunk_tokens=limit)
    assert "".join(c.text for c in chunks) == text


def test_chunk_roundtrip_dict():
    chunk = Chunk(id="A#0", source_title="A", text="Body.", token_count=2, keywords=["k"])
    assert Chunk.from_dict(chunk.to_dict()) == chunk
