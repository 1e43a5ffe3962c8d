from __future__ import annotations

import re

import numpy as np
import pytest

from quake.core.coverage import coverage_local
from quake.core.global_search import (
    generate_suite,
    global_search,
    memory_from,
    memory_overlap,
    summarize_flow,
)
from quake.core.models.context import ContextFlow, ContextSchema
from quake.core.models.coverage import CoverageUniverse
from quake.core.models.enums import SearchAction
from quake.core.models.search import SearchConfig
from quake.core.objectives import global_objective, local_objective

FIXED_INSTANCES = (
    (1.0, 1.0, 0.0),
    (1000.0, 500.0, 1.0),
    (10.0, 5.0, 0.5),
    (100.0, 50.0, 0.0),
    (1.0, 1.0, 1.0),
)


class RepeatingSearch:
    """Local search stand-in that always proposes the same instances."""

    def __init__(self) -> None:
        self.calls = 0

    def __call__(
        self,
        schema: ContextSchema,
        universe: CoverageUniverse,
        cfg: SearchConfig,
        rng: np.random.Generator,
        avoid: frozenset = frozenset(),
        flow_id: str = "aeq",
    ) -> ContextFlow:
        self.calls += 1
        return ContextFlow(id=flow_id, instances=FIXED_INSTANCES)


@pytest.fixture
def search_result(web_schema, coarse_universe, fast_search):
    return global_search(web_schema, coarse_universe, fast_search, np.random.default_rng(0))


def test_shelved_flows_are_evicted_at_max_age(web_schema, coarse_universe):
    cfg = SearchConfig(flow_length=5, mem_max_age=3, stale_limit=8, hard_limit=50)
    stub = RepeatingSearch()

    result = global_search(
        web_schema, coarse_universe, cfg, np.random.default_rng(0), local_search=stub
    )

    actions = [(event.iter, event.action) for event in result.trace]
    assert actions[0] == (0, SearchAction.ACCEPT_NEW)
    assert [a for a in actions if a[1] is SearchAction.SHELVE] == [
        (i, SearchAction.SHELVE) for i in range(1, 9)
    ]
    evictions = [event for event in result.trace if event.action is SearchAction.EVICT]
    assert [(e.iter, e.flow_id, e.age) for e in evictions] == [
        (i + 3, f"aeq-{i:04d}", 3) for i in range(1, 6)
    ]
    assert result.iterations_used == 9
    assert stub.calls == 9
    assert [flow.id for flow in result.solution] == ["aeq-0000"]


def test_accepted_additions_strictly_increase_g(search_result):
    accepted = [
        event
        for event in search_result.trace
        if event.action in (SearchAction.ACCEPT_NEW, SearchAction.PROMOTE)
    ]

    assert accepted
    for event in accepted:
        assert event.g_after > event.g_before
    values = [event.g_after for event in accepted]
    assert values == sorted(values)
    assert len(set(values)) == len(values)
    assert search_result.g_value == values[-1]


def test_memory_ages_and_iteration_limits_hold(search_result, fast_search):
    assert all(event.age <= fast_search.mem_max_age for event in search_result.trace)
    assert search_result.iterations_used <= fast_search.hard_limit
    last_gain = max(
        event.iter
        for event in search_result.trace
        if event.action in (SearchAction.ACCEPT_NEW, SearchAction.PROMOTE)
    )
    expected = min(last_gain + fast_search.stale_limit + 1, fast_search.hard_limit)
    assert search_result.iterations_used == expected


def test_result_values_can_be_recomputed(web_schema, coarse_universe, fast_search, search_result):
    g = global_objective(
        web_schema,
        search_result.solution,
        coarse_universe,
        fast_search.weights.global_,
        fast_search.ep,
        fast_search.lambda_size,
    )

    assert g == pytest.approx(search_result.g_value, abs=1e-9)
    for flow, summary in zip(search_result.solution, search_result.per_flow, strict=True):
        assert summary.flow_id == flow.id
        value = local_objective(
            web_schema, flow, coarse_universe, fast_search.weights.local, fast_search.ep
        )
        assert summary.l_value == pytest.approx(value, abs=1e-9)
        assert summary.pairs_covered == coverage_local(coarse_universe, flow)


def test_solution_flows_are_valid_and_named_in_order(web_schema, search_result, fast_search):
    for flow in search_result.solution:
        assert re.fullmatch(r"aeq-\d{4}", flow.id)
        assert len(flow) == fast_search.flow_length
        assert all(web_schema.satisfies_constraints(inst) for inst in flow.instances)
    ids = [flow.id for flow in search_result.solution]
    assert ids == sorted(ids)


def test_search_is_deterministic(web_schema, coarse_universe, fast_search, search_result):
    again = global_search(web_schema, coarse_universe, fast_search, np.random.default_rng(0))

    assert again.solution == search_result.solution
    assert again.trace == search_result.trace


def test_pairs_covered_matches_the_universe(search_result, coarse_universe):
    assert search_result.universe_size == len(coarse_universe.pairs)
    assert 0 < search_result.pairs_covered <= search_result.universe_size
    assert search_result.coverage_ratio == pytest.approx(
        search_result.pairs_covered / search_result.universe_size
    )


def test_rounds_run_independent_searches(web_schema, coarse_universe, fast_search):
    cfg = fast_search.model_copy(update={"rounds": 2, "hard_limit": 6, "stale_limit": 3})

    result = generate_suite(web_schema, coarse_universe, cfg)

    prefixes = {flow.id.split("-aeq-")[0] for flow in result.solution}
    assert prefixes <= {"r0", "r1"}
    assert {event.round for event in result.trace or ()} == {0, 1}
    assert len(result.round_iterations) == 2
    assert sum(result.round_iterations) == result.iterations_used
    assert all(count <= cfg.hard_limit for count in result.round_iterations)
    for index in (0, 1):
        accepted = [
            event.g_after
            for event in result.trace or ()
            if event.round == index
            and event.action in (SearchAction.ACCEPT_NEW, SearchAction.PROMOTE)
        ]
        assert accepted == sorted(accepted)


def test_single_round_uses_the_seed(web_schema, coarse_universe, fast_search):
    first = generate_suite(web_schema, coarse_universe, fast_search)
    second = global_search(
        web_schema, coarse_universe, fast_search, np.random.default_rng(fast_search.seed)
    )

    assert first.solution == second.solution
    assert first.round_iterations == (first.iterations_used,)


def test_memory_tracks_covered_pairs_and_instances(web_schema, coarse_universe):
    flow = ContextFlow(id="m", instances=FIXED_INSTANCES)

    memory = memory_from(coarse_universe, [flow])

    assert memory.instances == frozenset(FIXED_INSTANCES)
    assert len(memory.universe.covered) == coverage_local(coarse_universe, flow)
    assert memory_overlap(flow, memory.instances) == len(FIXED_INSTANCES)
    assert memory_overlap(flow, frozenset()) == 0


def test_summarize_flow_uses_the_fresh_universe(web_schema, coarse_universe, fast_search):
    flow = ContextFlow(id="s", instances=FIXED_INSTANCES)
    covered = memory_from(coarse_universe, [flow]).universe

    summary = summarize_flow(web_schema, flow, covered, fast_search)

    assert summary.pairs_covered == coverage_local(coarse_universe, flow)
    assert summary.l_value == pytest.approx(
        local_objective(
            web_schema, flow, coarse_universe, fast_search.weights.local, fast_search.ep
        )
    )
