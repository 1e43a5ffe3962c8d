"""Memory-based global search that assembles an AEQ suite.

SOL is the suite under construction, MEM the shelf of flows that did not
improve G when they were produced, and T the memory of pairs and instances
already in SOL that steers local search away from them.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import structlog

from quake.core.coverage import coverage_local, mark_covered, pairs_realized
from quake.core.metric import (
    MIN_PROFILE_LENGTH,
    classify_shape,
    count_windows,
    origin_distance_series,
    transition_distances,
)
from quake.core.models.context import ContextFlow, ContextInstance, ContextSchema
from quake.core.models.coverage import CoverageUniverse
from quake.core.models.enums import SearchAction, ShapeClass
from quake.core.models.search import (
    FlowSummary,
    RealityDistribution,
    SearchConfig,
    SearchMemory,
    SearchResult,
    TraceEvent,
)
from quake.core.objectives import SuiteScorer, local_objective
from quake.core.protocols import LocalSearch
from quake.core.tabu import TabuLocalSearch

log: structlog.stdlib.BoundLogger = structlog.get_logger(__name__)


@dataclass
class _Shelved:
    flow: ContextFlow
    age: int = 0


def memory_from(universe: CoverageUniverse, solution: Sequence[ContextFlow]) -> SearchMemory:
    fresh = CoverageUniverse(criterion_id=universe.criterion_id, pairs=universe.pairs)
    instances = frozenset(inst for flow in solution for inst in flow.instances)
    return SearchMemory(universe=mark_covered(fresh, solution), instances=instances)


def memory_overlap(flow: ContextFlow, instances: frozenset[ContextInstance]) -> int:
    return sum(1 for inst in flow.instances if inst in instances)


def summarize_flow(
    schema: ContextSchema,
    flow: ContextFlow,
    universe: CoverageUniverse,
    cfg: SearchConfig,
    distribution: RealityDistribution | None = None,
) -> FlowSummary:
    """Per-flow diagnostics; ``l_value`` is L(f) against the fresh universe."""
    fresh = CoverageUniverse(criterion_id=universe.criterion_id, pairs=universe.pairs)
    ep_count = 0.0
    shape = ShapeClass.UNCLASSIFIED
    if len(flow) >= MIN_PROFILE_LENGTH:
        ep_count = float(count_windows(transition_distances(schema, flow), cfg.ep))
        shape = classify_shape(origin_distance_series(schema, flow), cfg.ep.shape)
    return FlowSummary(
        flow_id=flow.id,
        l_value=local_objective(schema, flow, fresh, cfg.weights.local, cfg.ep, distribution),
        ep_count=ep_count,
        shape=shape,
        pairs_covered=coverage_local(fresh, flow),
    )


def global_search(
    schema: ContextSchema,
    universe: CoverageUniverse,
    cfg: SearchConfig,
    rng: np.random.Generator,
    *,
    local_search: LocalSearch | None = None,
    distribution: RealityDistribution | None = None,
    id_prefix: str = "aeq",
    round_index: int = 0,
) -> SearchResult:
    search = local_search or TabuLocalSearch(distribution=distribution)
    scorer = SuiteScorer(schema, universe, cfg.weights.global_, cfg.ep, cfg.lambda_size)
    sol: list[ContextFlow] = []
    mem: list[_Shelved] = []
    memory = memory_from(universe, sol)
    trace: list[TraceEvent] = []
    g = 0.0
    stale = 0
    produced = 0
    iterations = 0
    limit = cfg.max_memory_overlap

    log.info(
        "search_started",
        universe=len(universe.pairs),
        flow_length=cfg.flow_length,
        round=round_index,
    )
    for iteration in range(cfg.hard_limit):
        iterations = iteration + 1
        improved = False

        for shelved in list(mem):
            candidate = scorer.score([*sol, shelved.flow])
            if memory_overlap(shelved.flow, memory.instances) <= limit and candidate > g:
                trace.append(
                    TraceEvent(
                        iter=iteration,
                        action=SearchAction.PROMOTE,
                        g_before=g,
                        g_after=candidate,
                        flow_id=shelved.flow.id,
                        age=shelved.age,
                        round=round_index,
                    )
                )
                sol.append(shelved.flow)
                mem.remove(shelved)
                g = candidate
                improved = True
                log.debug("flow_promoted", flow_id=shelved.flow.id, g=g)
            elif shelved.age >= cfg.mem_max_age:
                trace.append(
                    TraceEvent(
                        iter=iteration,
                        action=SearchAction.EVICT,
                        g_before=g,
                        g_after=g,
                        flow_id=shelved.flow.id,
                        age=shelved.age,
                        round=round_index,
                    )
                )
                mem.remove(shelved)
                log.debug("flow_evicted", flow_id=shelved.flow.id, age=shelved.age)

        flow_id = f"{id_prefix}-{produced:04d}"
        produced += 1
        flow = search(schema, memory.universe, cfg, rng, memory.instances, flow_id)
        candidate = scorer.score([*sol, flow])
        if memory_overlap(flow, memory.instances) <= limit and candidate > g:
            trace.append(
                TraceEvent(
                    iter=iteration,
                    action=SearchAction.ACCEPT_NEW,
                    g_before=g,
                    g_after=candidate,
                    flow_id=flow.id,
                    round=round_index,
                )
            )
            sol.append(flow)
            g = candidate
            improved = True
            log.debug("flow_accepted", flow_id=flow.id, g=g)
        else:
            trace.append(
                TraceEvent(
                    iter=iteration,
                    action=SearchAction.SHELVE,
                    g_before=g,
                    g_after=g,
                    flow_id=flow.id,
                    round=round_index,
                )
            )
            mem.append(_Shelved(flow))
            log.debug("flow_shelved", flow_id=flow.id)

        memory = memory_from(universe, sol)
        for shelved in mem:
            shelved.age += 1

        stale = 0 if improved else stale + 1
        if stale >= cfg.stale_limit:
            break

    covered = len(pairs_realized(universe, sol))
    log.info(
        "search_finished",
        iterations=iterations,
        flows=len(sol),
        g=round(g, 6),
        covered=covered,
        universe=len(universe.pairs),
    )
    return SearchResult(
        solution=tuple(sol),
        g_value=g,
        per_flow=tuple(summarize_flow(schema, f, universe, cfg, distribution) for f in sol),
        iterations_used=iterations,
        universe_size=len(universe.pairs),
        pairs_covered=covered,
        trace=tuple(trace),
        round_iterations=(iterations,),
    )


def generate_suite(
    schema: ContextSchema,
    universe: CoverageUniverse,
    cfg: SearchConfig,
    *,
    distribution: RealityDistribution | None = None,
    local_search: LocalSearch | None = None,
) -> SearchResult:
    """Run ``cfg.rounds`` independent global searches and join their suites."""
    if cfg.rounds == 1:
        return global_search(
            schema,
            universe,
            cfg,
            np.random.default_rng(cfg.seed),
            local_search=local_search,
            distribution=distribution,
        )
    results = [
        global_search(
            schema,
            universe,
            cfg,
            np.random.default_rng(child),
            local_search=local_search,
            distribution=distribution,
            id_prefix=f"r{index}-aeq",
            round_index=index,
        )
        for index, child in enumerate(np.random.SeedSequence(cfg.seed).spawn(cfg.rounds))
    ]
    solution = tuple(flow for result in results for flow in result.solution)
    scorer = SuiteScorer(schema, universe, cfg.weights.global_, cfg.ep, cfg.lambda_size)
    return SearchResult(
        solution=solution,
        g_value=scorer.score(solution),
        per_flow=tuple(summary for result in results for summary in result.per_flow),
        iterations_used=sum(result.iterations_used for result in results),
        universe_size=len(universe.pairs),
        pairs_covered=len(pairs_realized(universe, solution)),
        trace=tuple(event for result in results for event in result.trace or ()),
        round_iterations=tuple(result.iterations_used for result in results),
    )
