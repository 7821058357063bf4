"""Small hypergraph builders shared across test modules."""

from __future__ import annotations

import random

from igmirag.hypergraph import Hypergraph, Layer, Vertex, canonical_key


def make_graph(
    entities: list[str],
    pairs: list[tuple[str, str]] | None = None,
    associations: list[tuple[str, ...]] | None = None,
    chunk_map: dict[str, set[str]] | None = None,
) -> tuple[Hypergraph, dict[str, str]]:
    """Build a graph from plain names; returns it with a name-to-key map."""
    graph = Hypergraph()
    keys: dict[str, str] = {}
    chunk_map = chunk_map or {}
    for name in entities:
        key = canonical_key(1, [name])
        keys[name] = key
        graph.upsert_vertex(
            Vertex(
                key=key,
                layer=Layer.ENTITY,
                name=name,
                description=f"{name} description",
                chunk_ids=set(chunk_map.get(name, set())),
            )
        )
    for group, layer in ((pairs or [], 2), (associations or [], 3)):
        for names in group:
            names = list(names)
            key = canonical_key(layer, names)
            display = "<" + ", ".join(names) + ">"
            keys[display] = key
            graph.upsert_vertex(
                Vertex(
                    key=key,
                    layer=Layer(layer),
                    name=display,
                    description=f"{display} description",
                    members=[keys[n] for n in names],
                    chunk_ids=set(chunk_map.get(display, set())),
                )
            )
    return graph, keys


def to_table(graph: Hypergraph) -> dict[str, tuple[int, list[str]]]:
    """Flatten a graph into the plain table the reference loop consumes."""
    return {
        key: (int(v.layer), list(v.members)) for key, v in graph.vertices.items()
    }


def star_fixture(leaves: int = 4) -> tuple[Hypergraph, str, list[str]]:
    """One association vertex containing ``leaves`` entities.

    Returns the graph, the hub key, and the sorted leaf keys.
    """
    names = [f"leaf {i}" for i in range(leaves)]
    graph, keys = make_graph(names, associations=[tuple(names)])
    hub = keys["<" + ", ".join(names) + ">"]
    return graph, hub, sorted(keys[n] for n in names)


def two_hop_fixture() -> tuple[Hypergraph, dict[str, str]]:
    """Chain anchor-entity -> pair -> bridge-entity -> pair -> far-entity."""
    graph, keys = make_graph(
        ["alpha", "bridge", "far"],
        pairs=[("alpha", "bridge"), ("bridge", "far")],
    )
    return graph, keys


def random_layered_graph(
    rng: random.Random,
    max_entities: int = 40,
    max_pairs: int = 30,
    max_associations: int = 15,
) -> Hypergraph:
    """Random graph with all three layers for fuzz and oracle tests."""
    n_entities = rng.randint(1, max_entities)
    names = [f"e{i}" for i in range(n_entities)]
    pairs: list[tuple[str, str]] = []
    seen_pairs = set()
    for _ in range(rng.randint(0, max_pairs)):
        if n_entities < 2:
            break
        a, b = rng.sample(names, 2)
        key = tuple(sorted((a, b)))
        if key in seen_pairs:
            continue
        seen_pairs.add(key)
        pairs.append((a, b))
    associations: list[tuple[str, ...]] = []
    seen_assocs = set()
    for _ in range(rng.randint(0, max_associations)):
        if n_entities < 2:
            break
        size = rng.randint(2, min(6, n_entities))
        group = tuple(rng.sample(names, size))
        key = tuple(sorted(group))
        if key in seen_assocs:
            continue
        seen_assocs.add(key)
        associations.append(group)
    graph, _ = make_graph(names, pairs=pairs, associations=associations)
    return graph


def random_initial_scores(
    rng: random.Random, graph: Hypergraph, max_anchors: int = 8
) -> dict[str, float]:
    """Positive scores on a random subset of vertices, any layer."""
    keys = sorted(graph.vertices)
    count = rng.randint(1, min(max_anchors, len(keys)))
    chosen = rng.sample(keys, count)
    return {key: rng.uniform(0.01, 2.0) for key in sorted(chosen)}
