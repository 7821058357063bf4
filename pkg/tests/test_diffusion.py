"""Bidirectional diffusion: unit arithmetic, hand traces, oracle equivalence."""

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graph_fixtures import (
    make_graph,
    random_initial_scores,
    random_layered_graph,
    star_fixture,
    to_table,
    two_hop_fixture,
)
from igmirag.diffusion import (
    BACKWARD,
    FORWARD,
    DiffusionParams,
    activation_proportion,
    adjust_after_phase,
    diffuse,
    higher_count,
    preference,
    preference_gain,
    threshold_pass,
)
from pabd_reference import reference_diffuse


def test_preference_values():
    assert preference(0) == 0.0
    assert preference(1) == 0.5
    assert preference(3) == 0.75
    assert preference(9) == 0.9


def test_preference_rejects_negative_count():
    with pytest.raises(ValueError):
        preference(-1)


def test_higher_count_is_strict_and_defaults_missing_scores_to_zero():
    graph, keys = two_hop_fixture()
    pair = keys["<alpha, bridge>"]
    assert higher_count(graph, {keys["alpha"]: 1.0}, pair) == 1
    # Equal scores do not count; absent scores read as zero.
    assert higher_count(graph, {keys["alpha"]: 0.0}, pair) == 0
    assert higher_count(graph, {}, pair) == 0


def test_higher_count_for_entity_uses_containing_vertices():
    graph, keys = two_hop_fixture()
    scores = {keys["<alpha, bridge>"]: 0.3, keys["<bridge, far>"]: 0.1}
    assert higher_count(graph, scores, keys["bridge"]) == 2
    scores[keys["bridge"]] = 0.2
    assert higher_count(graph, scores, keys["bridge"]) == 1


def test_activation_proportion_counts_members_above_own_score():
    graph, keys = two_hop_fixture()
    pair = keys["<alpha, bridge>"]
    assert activation_proportion(graph, {keys["alpha"]: 1.0}, pair) == 0.5
    full = {keys["alpha"]: 1.0, keys["bridge"]: 0.2}
    assert activation_proportion(graph, full, pair) == 1.0


def test_activation_proportion_rejects_entities_and_unknown_keys():
    graph, keys = two_hop_fixture()
    with pytest.raises(ValueError):
        activation_proportion(graph, {}, keys["alpha"])
    with pytest.raises(KeyError):
        activation_proportion(graph, {}, "1|nobody")


def test_forward_gain_matches_hand_arithmetic():
    graph, hub, leaves = star_fixture()
    gain = preference_gain(graph, {hub: 1.0}, hub, leaves[0], 0.2, FORWARD)
    assert gain == 0.1


def test_backward_gain_matches_hand_arithmetic():
    graph, keys = two_hop_fixture()
    pair = keys["<alpha, bridge>"]
    gain = preference_gain(graph, {keys["alpha"]: 1.0}, pair, keys["alpha"], 0.2, BACKWARD)
    # (1.0 - 0.0) * (0.5 * 0.5 + 0.25 * 0.5) * 0.2
    assert gain == pytest.approx(0.075, abs=1e-15)


def test_preference_gain_rejects_unknown_direction():
    graph, hub, leaves = star_fixture()
    with pytest.raises(ValueError):
        preference_gain(graph, {}, hub, leaves[0], 0.2, "sideways")


def test_threshold_pass_is_strict():
    graph, keys = two_hop_fixture()
    pair = keys["<alpha, bridge>"]
    params = DiffusionParams()
    scores = {keys["alpha"]: 1.0}
    # Proportion 0.5 equals the layer-2 threshold, so it must not pass.
    assert not threshold_pass(graph, scores, pair, 1, 0.0, params)
    assert threshold_pass(graph, scores, pair, 1, 0.1, params)


def test_threshold_bonus_applies_only_to_target_layer():
    graph, keys = two_hop_fixture()
    pair = keys["<alpha, bridge>"]
    params = DiffusionParams()
    scores = {keys["alpha"]: 1.0}
    assert threshold_pass(graph, scores, pair, 2, 0.0, params)
    assert not threshold_pass(graph, scores, pair, 3, 0.0, params)


def test_threshold_uses_association_tau_for_layer_three():
    names = ["a", "b", "c", "d"]
    graph, keys = make_graph(names, associations=[tuple(names)])
    assoc = keys["<a, b, c, d>"]
    params = DiffusionParams()
    # One of four members above: proportion 0.25, layer-3 threshold 0.4.
    scores = {keys["a"]: 1.0}
    assert not threshold_pass(graph, scores, assoc, 1, 0.0, params)
    assert threshold_pass(graph, scores, assoc, 1, 0.2, params)


def test_adjust_after_phase_covers_all_branches():
    params = DiffusionParams()
    assert adjust_after_phase({"x"}, 0.2, 5, FORWARD, params) == (0.2, 5)
    assert adjust_after_phase(set(), 0.45, 5, FORWARD, params) == (0.5, 5)
    bias, i = adjust_after_phase({"x"}, 0.05, 5, BACKWARD, params)
    assert bias == 0.0 and i == 5
    bias, i = adjust_after_phase(set(), 0.4, 5, BACKWARD, params)
    assert bias == 0.5 and i == 4
    with pytest.raises(ValueError):
        adjust_after_phase(set(), 0.0, 0, "sideways", params)


def test_params_validation():
    with pytest.raises(ValueError):
        DiffusionParams(gamma=0.0).validate()
    with pytest.raises(ValueError):
        DiffusionParams(max_total_iterations_factor=0).validate()


def test_diffuse_validates_inputs():
    graph, hub, leaves = star_fixture()
    with pytest.raises(ValueError):
        diffuse(graph, {hub: 1.0}, target_layer=4, depth=1)
    with pytest.raises(ValueError):
        diffuse(graph, {hub: 1.0}, target_layer=1, depth=0)
    with pytest.raises(KeyError):
        diffuse(graph, {"1|ghost": 1.0}, target_layer=1, depth=1)


def test_star_entities_gain_exactly_point_one_in_first_iteration():
    graph, hub, leaves = star_fixture()
    result = diffuse(graph, {hub: 1.0}, target_layer=1, depth=1)
    first = json.loads(result.trace[0])
    assert first["phase"] == "forward"
    assert first["iteration"] == 0
    assert first["gains"] == {leaf: 0.1 for leaf in leaves}
    assert first["newly_activated"] == leaves


def test_star_trace_alternates_phases_and_ends_with_reason():
    graph, hub, leaves = star_fixture()
    result = diffuse(graph, {hub: 1.0}, target_layer=1, depth=1)
    records = [json.loads(line) for line in result.trace]
    phases = [r["phase"] for r in records]
    assert phases[:-1] == ["forward", "backward"] * result.pairs
    assert records[-1]["phase"] == "end"
    assert records[-1]["reason"] == result.reason


def test_graph_without_relations_returns_anchor_scores_unchanged():
    graph, keys = make_graph(["solo", "duo"])
    anchors = {keys["solo"]: 1.0, keys["duo"]: 0.5}
    result = diffuse(graph, anchors, target_layer=1, depth=1)
    assert result.scores == {keys["solo"]: 1.0, keys["duo"]: 0.5}
    assert result.reason == "stalled"
    assert result.pairs <= 3


def test_two_hop_recovery_after_backward_stall():
    graph, keys = two_hop_fixture()
    anchors = {keys["alpha"]: 1.0}
    result = diffuse(graph, anchors, target_layer=1, depth=2)
    near = keys["<alpha, bridge>"]
    far_pair = keys["<bridge, far>"]

    assert result.scores[near] == pytest.approx(0.144375, abs=1e-15)
    assert result.scores[keys["bridge"]] == pytest.approx(0.01425, abs=1e-15)
    assert result.scores[far_pair] == pytest.approx(0.0005625, abs=1e-15)
    assert result.reason == "depth"

    records = [json.loads(line) for line in result.trace]
    stall_index = next(
        i
        for i, r in enumerate(records)
        if r["phase"] == "backward" and r["newly_activated"] == []
    )
    recovery_index = next(
        i for i, r in enumerate(records) if far_pair in r.get("newly_activated", [])
    )
    # The far pair only activates after a stalled backward phase raised
    # the bias enough to reopen the threshold gate.
    assert stall_index < recovery_index
    assert records[stall_index]["bias"] > 0.0


def test_equal_scores_do_not_diffuse():
    graph, hub, leaves = star_fixture()
    result = diffuse(graph, {hub: 1.0, leaves[0]: 1.0}, target_layer=1, depth=1)
    first = json.loads(result.trace[0])
    assert leaves[0] not in first["gains"]
    assert set(first["gains"]) == set(leaves[1:])


def test_extended_scores_sorted_by_score_then_key():
    graph, keys = two_hop_fixture()
    result = diffuse(graph, {keys["alpha"]: 1.0}, target_layer=1, depth=2)
    items = list(result.scores.items())
    assert items == sorted(items, key=lambda kv: (-kv[1], kv[0]))


def test_trace_is_byte_identical_across_runs():
    graph, keys = two_hop_fixture()
    first = diffuse(graph, {keys["alpha"]: 1.0}, target_layer=2, depth=3)
    second = diffuse(graph, {keys["alpha"]: 1.0}, target_layer=2, depth=3)
    assert first.trace == second.trace
    assert first.scores == second.scores


def test_matches_reference_on_random_graphs():
    rng = random.Random(20240817)
    for _ in range(40):
        graph = random_layered_graph(rng)
        scores = random_initial_scores(rng, graph)
        target = rng.randint(1, 3)
        depth = rng.randint(1, 5)
        result = diffuse(graph, scores, target_layer=target, depth=depth)
        expected, expected_active = reference_diffuse(to_table(graph), scores, target, depth)
        assert set(result.scores) == set(expected)
        assert result.activated == expected_active
        for key, value in expected.items():
            assert abs(result.scores[key] - value) <= 1e-12, key


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10**9), depth=st.integers(1, 5))
def test_termination_and_monotonicity(seed, depth):
    rng = random.Random(seed)
    graph = random_layered_graph(rng, max_entities=20, max_pairs=15, max_associations=8)
    scores = random_initial_scores(rng, graph)
    result = diffuse(graph, scores, target_layer=rng.randint(1, 3), depth=depth)
    assert result.pairs <= 3 * depth
    assert result.reason in {"stalled", "depth", "cap"}
    # Gains are always positive, so no vertex ever loses score.
    for key, initial in scores.items():
        assert result.scores[key] >= initial
    assert set(scores) <= set(result.scores)
    assert set(result.scores) <= set(graph.vertices)
