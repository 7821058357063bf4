"""Preference-aware bidirectional diffusion over the hypergraph.

Scores committed at the start of an iteration drive both phases; gains
accumulate in a staged copy that is committed only after the backward
phase.  Every collection is walked in sorted order so a rerun over the
same graph produces byte-identical traces.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .hypergraph import Hypergraph, Layer

FORWARD = "forward"
BACKWARD = "backward"


@dataclass
class DiffusionParams:
    gamma: float = 0.2
    tau_L: float = 0.5
    tau_H: float = 0.4
    bias_cap: float = 0.5
    forward_stall_step: float = 0.10
    backward_relief_step: float = 0.10
    backward_stall_step: float = 0.15
    target_layer_bonus: float = 0.05
    max_total_iterations_factor: int = 3

    def validate(self) -> None:
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.bias_cap < 0:
            raise ValueError("bias_cap must be nonnegative")
        if self.max_total_iterations_factor < 1:
            raise ValueError("max_total_iterations_factor must be at least 1")


@dataclass
class DiffusionResult:
    scores: dict[str, float]
    reason: str
    iterations: int
    pairs: int
    activated: set[str] = field(default_factory=set)
    trace: list[str] = field(default_factory=list)


def _score(scores: dict[str, float], key: str) -> float:
    return scores.get(key, 0.0)


def _cohort(graph: Hypergraph, key: str) -> list[str]:
    # A vertex's incidence cohort: members for pair/association
    # vertices, containing pair/association vertices for entities.
    if int(graph.vertex_layer(key)) == 1:
        return graph.layer_filtered_neighbors(key, BACKWARD)
    return graph.layer_filtered_neighbors(key, FORWARD)


def higher_count(graph: Hypergraph, scores: dict[str, float], key: str) -> int:
    """Count cohort vertices scoring strictly above ``key``'s own score."""
    own = _score(scores, key)
    count = 0
    for other in _cohort(graph, key):
        if _score(scores, other) > own:
            count += 1
    return count


def preference(n: int) -> float:
    """Preference coefficient n/(n+1); rises toward 1 with the count."""
    if n < 0:
        raise ValueError("count must be nonnegative")
    return n / (n + 1)


def activation_proportion(graph: Hypergraph, scores: dict[str, float], key: str) -> float:
    """Fraction of a pair/association vertex's members scoring above it."""
    vertex = graph.vertices.get(key)
    if vertex is None:
        raise KeyError(f"unknown vertex: {key}")
    if vertex.layer == Layer.ENTITY:
        raise ValueError("activation proportion is undefined for entity vertices")
    return higher_count(graph, scores, key) / len(vertex.members)


def preference_gain(
    graph: Hypergraph,
    scores: dict[str, float],
    container: str,
    member: str,
    gamma: float,
    direction: str,
) -> float:
    """Score increment pushed along one container/member incidence."""
    s_c = _score(scores, container)
    s_v = _score(scores, member)
    if direction == FORWARD:
        rho = preference(higher_count(graph, scores, member))
        return (s_c - s_v) * rho * gamma
    if direction == BACKWARD:
        rho = preference(higher_count(graph, scores, container))
        p = activation_proportion(graph, scores, container)
        return (s_v - s_c) * (rho * 0.5 + p * p * 0.5) * gamma
    raise ValueError(f"unknown direction: {direction!r}")


def threshold_pass(
    graph: Hypergraph,
    scores: dict[str, float],
    key: str,
    target_layer: int,
    bias: float,
    params: DiffusionParams,
) -> bool:
    """Gate a backward push into ``key`` by its activation proportion.

    The target-layer bonus widens the gate for this evaluation only; the
    ambient bias is not mutated.
    """
    layer = int(graph.vertex_layer(key))
    tau0 = params.tau_L if layer == 2 else params.tau_H
    effective_bias = bias + (params.target_layer_bonus if layer == int(target_layer) else 0.0)
    return activation_proportion(graph, scores, key) > tau0 - effective_bias


def adjust_after_phase(
    newly_activated: set[str],
    bias: float,
    iteration: int,
    direction: str,
    params: DiffusionParams,
) -> tuple[float, int]:
    """Update bias and the committed-iteration counter after a phase.

    A stalled backward phase also rolls the counter back one step so the
    iteration is retried with a relaxed threshold.
    """
    if direction == FORWARD:
        if newly_activated:
            return bias, iteration
        return min(bias + params.forward_stall_step, params.bias_cap), iteration
    if direction == BACKWARD:
        if newly_activated:
            return max(bias - params.backward_relief_step, 0.0), iteration
        return min(bias + params.backward_stall_step, params.bias_cap), iteration - 1
    raise ValueError(f"unknown direction: {direction!r}")


def _trace_phase(
    trace: list[str],
    iteration: int,
    phase: str,
    bias: float,
    newly_activated: set[str],
    gains: dict[str, float],
) -> None:
    record = {
        "iteration": iteration,
        "phase": phase,
        "bias": bias,
        "newly_activated": sorted(newly_activated),
        "gains": gains,
    }
    trace.append(json.dumps(record, sort_keys=True, ensure_ascii=False))


def diffuse(
    graph: Hypergraph,
    initial_scores: dict[str, float],
    target_layer: int,
    depth: int,
    params: DiffusionParams | None = None,
) -> DiffusionResult:
    """Run bidirectional diffusion from the anchor scores.

    Returns the extended scores sorted by descending score (key breaks
    ties), the stop reason (``stalled``, ``depth``, or ``cap``), the
    committed iteration count, and the number of phase pairs executed.
    """
    if params is None:
        params = DiffusionParams()
    params.validate()
    if int(target_layer) not in (1, 2, 3):
        raise ValueError(f"target layer must be 1, 2, or 3, got {target_layer}")
    if depth < 1:
        raise ValueError(f"depth must be at least 1, got {depth}")
    for key in sorted(initial_scores):
        if key not in graph.vertices:
            raise KeyError(f"initial score for unknown vertex: {key}")

    scores = dict(initial_scores)
    activated = set(scores)
    by_layer: dict[int, set[str]] = {1: set(), 2: set(), 3: set()}
    for key in activated:
        by_layer[int(graph.vertex_layer(key))].add(key)

    trace: list[str] = []
    bias = 0.0
    iteration = 0
    pair_count = 0
    max_pairs = params.max_total_iterations_factor * depth
    stalled = False

    while iteration < depth and pair_count < max_pairs:
        pair_count += 1
        pass_iteration = iteration
        staged = dict(scores)
        forward_new: set[str] = set()
        backward_new: set[str] = set()

        forward_gains: dict[str, float] = {}
        for container in sorted(by_layer[3] | by_layer[2]):
            for member in graph.layer_filtered_neighbors(container, FORWARD):
                if _score(scores, container) > _score(scores, member) and higher_count(
                    graph, scores, member
                ) > 0:
                    gain = preference_gain(graph, scores, container, member, params.gamma, FORWARD)
                    staged[member] = staged.get(member, 0.0) + gain
                    forward_gains[member] = forward_gains.get(member, 0.0) + gain
                    if member not in activated:
                        forward_new.add(member)
        if forward_new:
            activated |= forward_new
            for key in forward_new:
                by_layer[int(graph.vertex_layer(key))].add(key)
        bias, iteration = adjust_after_phase(forward_new, bias, iteration, FORWARD, params)
        _trace_phase(trace, pass_iteration, FORWARD, bias, forward_new, forward_gains)

        backward_gains: dict[str, float] = {}
        for member in sorted(by_layer[1]):
            for container in graph.layer_filtered_neighbors(member, BACKWARD):
                if _score(scores, member) <= _score(scores, container):
                    continue
                if not threshold_pass(graph, scores, container, target_layer, bias, params):
                    continue
                gain = preference_gain(graph, scores, container, member, params.gamma, BACKWARD)
                staged[container] = staged.get(container, 0.0) + gain
                backward_gains[container] = backward_gains.get(container, 0.0) + gain
                if container not in activated:
                    backward_new.add(container)
        if backward_new:
            activated |= backward_new
            for key in backward_new:
                by_layer[int(graph.vertex_layer(key))].add(key)
        bias, iteration = adjust_after_phase(backward_new, bias, iteration, BACKWARD, params)
        _trace_phase(trace, pass_iteration, BACKWARD, bias, backward_new, backward_gains)

        scores = staged
        if not forward_new and not backward_new and bias == params.bias_cap:
            stalled = True
            break
        iteration += 1

    if stalled:
        reason = "stalled"
    elif iteration >= depth:
        reason = "depth"
    else:
        reason = "cap"
    trace.append(
        json.dumps(
            {"iteration": iteration, "phase": "end", "bias": bias, "reason": reason},
            sort_keys=True,
            ensure_ascii=False,
        )
    )

    ordered = dict(sorted(scores.items(), key=lambda kv: (-kv[1], kv[0])))
    return DiffusionResult(
        scores=ordered,
        reason=reason,
        iterations=iteration,
        pairs=pair_count,
        activated=activated,
        trace=trace,
    )
