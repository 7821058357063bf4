import pytest

from igmirag.errors import CorruptStore, InvariantViolation
from igmirag.hypergraph import Hypergraph, Layer, Vertex, canonical_key
from igmirag.tokens import Chunk


def entity(name, desc="", chunks=()):
    return Vertex(
        key=canonical_key(1, [name]),
        layer=Layer.ENTITY,
        name=name,
        description=desc,
        chunk_ids=set(chunks),
    )


def pair(a, b, desc="", chunks=()):
    return Vertex(
        key=canonical_key(2, [a, b]),
        layer=Layer.PAIR_RELATION,
        name=f"<{a}, {b}>",
        description=desc,
        members=[canonical_key(1, [a]), canonical_key(1, [b])],
        chunk_ids=set(chunks),
    )


def graph_with(*vertices, chunks=()):
    g = Hypergraph()
    for cid in chunks:
        g.add_chunk(Chunk(id=cid, source_title=cid.split("#")[0], text="body.", token_count=2))
    for v in vertices:
        g.upsert_vertex(v)
    return g


class TestCanonicalKey:
    def test_order_insensitive_for_relations(self):
        assert canonical_key(2, ["B", "a"]) == canonical_key(2, ["a", "B"])

    def test_casefold_and_trim(self):
        assert canonical_key(1, ["  Head I "]) == "1|head i"

    def test_layer_arity_enforced(self):
        with pytest.raises(ValueError):
            canonical_key(1, ["a", "b"])
        with pytest.raises(ValueError):
            canonical_key(2, ["a"])
        with pytest.raises(ValueError):
            canonical_key(3, ["a"])
        with pytest.raises(ValueError):
            canonical_key(2, [])

    def test_association_key_sorted_join(self):
        key = canonical_key(3, ["Gamma", "alpha", "Beta"])
        assert key == "3|alpha⊕beta⊕gamma"


class TestUpsert:
    def test_merge_joins_descriptions_and_unions_attributes(self):
        g = graph_with(chunks=["D#0", "D#1"])
        g.upsert_vertex(entity("X", desc="first.", chunks=["D#0"]))
        g.upsert_vertex(
            Vertex(
                key="1|x",
                layer=Layer.ENTITY,
                name="x lowercase",
                description="second.",
                attributes=["a"],
                chunk_ids={"D#1"},
            )
        )
        v = g.vertices["1|x"]
        assert v.name == "X"
        assert v.description == "first.\nsecond."
        assert v.attributes == ["a"]
        assert v.chunk_ids == {"D#0", "D#1"}

    def test_merge_skips_duplicate_description_line(self):
        g = graph_with(entity("X", desc="same."))
        g.upsert_vertex(entity("X", desc="same."))
        assert g.vertices["1|x"].description == "same."

    def test_member_must_exist_as_entity(self):
        g = graph_with(entity("A"))
        with pytest.raises(InvariantViolation):
            g.upsert_vertex(pair("A", "Missing"))

    def test_merge_conflicting_members_rejected(self):
        g = graph_with(entity("A"), entity("B"), entity("C"), pair("A", "B"))
        clash = pair("A", "C")
        clash.key = canonical_key(2, ["A", "B"])
        with pytest.raises(InvariantViolation):
            g.upsert_vertex(clash)

    def test_vertex_arity_validation(self):
        bad = Vertex(key="2|a⊕b", layer=Layer.PAIR_RELATION, name="<a, b>", members=["1|a"])
        with pytest.raises(InvariantViolation):
            bad.validate()


class TestNeighbors:
    def test_forward_yields_members_backward_yields_containers(self):
        g = graph_with(entity("A"), entity("B"), pair("A", "B"))
        pk = canonical_key(2, ["A", "B"])
        assert g.layer_filtered_neighbors(pk, "forward") == ["1|a", "1|b"]
        assert g.layer_filtered_neighbors("1|a", "backward") == [pk]
        assert g.layer_filtered_neighbors("1|a", "forward") == []
        assert g.layer_filtered_neighbors(pk, "backward") == []

    def test_backward_list_sorted(self):
        g = graph_with(
            entity("A"), entity("B"), entity("C"), pair("A", "C"), pair("A", "B")
        )
        assert g.layer_filtered_neighbors("1|a", "backward") == [
            canonical_key(2, ["A", "B"]),
            canonical_key(2, ["A", "C"]),
        ]

    def test_unknown_key_and_direction(self):
        g = graph_with(entity("A"))
        with pytest.raises(KeyError):
            g.layer_filtered_neighbors("1|nope", "forward")
        with pytest.raises(ValueError):
            g.layer_filtered_neighbors("1|a", "sideways")


def test_counts_and_layer_keys():
    g = graph_with(entity("A"), entity("B"), pair("A", "B"))
    assert g.counts() == {"entities": 2, "pairs": 1, "associations": 0, "chunks": 0}
    assert g.layer_keys(1) == ["1|a", "1|b"]
    assert g.layer_keys(3) == []


def test_chunk_degree():
    g = graph_with(entity("A", chunks=["D#0", "D#1"]), chunks=["D#0", "D#1"])
    assert g.chunk_degree("1|a") == 2
    with pytest.raises(KeyError):
        g.chunk_degree("1|zzz")


class TestPersistence:
    def test_save_load_roundtrip_byte_identical(self, tmp_path):
        g = graph_with(
            entity("A", desc="alpha.", chunks=["D#0"]),
            entity("B", chunks=["D#0"]),
            pair("A", "B", desc="ab.", chunks=["D#0"]),
            chunks=["D#0"],
        )
        p1 = tmp_path / "one.hhhg"
        p2 = tmp_path / "two.hhhg"
        g.save(p1)
        g2 = Hypergraph.load(p1)
        g2.save(p2)
        assert p1.read_bytes() == p2.read_bytes()
        assert g2.counts() == g.counts()
        assert g2.layer_filtered_neighbors("1|a", "backward") == [canonical_key(2, ["A", "B"])]

    def test_load_rejects_bad_json(self, tmp_path):
        p = tmp_path / "broken.hhhg"
        p.write_text("{not json")
        with pytest.raises(CorruptStore):
            Hypergraph.load(p)

    def test_load_rejects_unknown_version(self, tmp_path):
        p = tmp_path / "v9.hhhg"
        p.write_text('{"format_version": 9, "chunks": {}, "vertices": {}}')
        with pytest.raises(CorruptStore):
            Hypergraph.load(p)

    def test_load_rejects_dangling_member(self, tmp_path):
        g = graph_with(entity("A"), entity("B"), pair("A", "B"))
        raw = g.to_dict()
        del raw["vertices"]["1|b"]
        p = tmp_path / "dangling.hhhg"
        import json

        p.write_text(json.dumps(raw))
        with pytest.raises(CorruptStore):
            Hypergraph.load(p)

    def test_save_refuses_invalid_graph(self, tmp_path):
        g = graph_with(entity("A", chunks=["D#0"]), chunks=["D#0"])
        g.vertices["1|a"].chunk_ids.add("ghost#0")
        with pytest.raises(InvariantViolation):
            g.save(tmp_path / "bad.hhhg")
