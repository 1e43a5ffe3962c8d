"""Tabu local search that synthesises a single AEQ.

Each iteration samples a neighbourhood of single-position moves (re-randomise
or nudge one instance), evaluates L(f) incrementally, and takes the best
non-tabu move. A move is identified by ``(position, new instance)``.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from collections.abc import Mapping, Sequence

import attrs
import numpy as np
import structlog

from quake.core.context import DEFAULT_ENUMERATION_CAP, find_valid_instance, iter_grid
from quake.core.coverage import instance_pairs
from quake.core.metric import recount_windows, window_states
from quake.core.models.context import ContextFlow, ContextInstance, ContextSchema, EpConfig
from quake.core.models.coverage import CoverageUniverse, ValuePair
from quake.core.models.search import RealityDistribution, SearchConfig
from quake.core.objectives import max_windows, reality_score

log: structlog.stdlib.BoundLogger = structlog.get_logger(__name__)

MoveKey = tuple[int, ContextInstance]


@attrs.frozen(slots=True)
class MoveRecord:
    iteration: int
    position: int
    instance: ContextInstance
    score: float
    aspiration: bool


class ValueSampler:
    """Draws grid values, preferring the coverage samples with probability ``sample_bias``.

    Each draw consumes two uniforms per property: one picks the pool, one the value.
    """

    def __init__(
        self,
        schema: ContextSchema,
        sample_bias: float = 0.5,
        value_samples: Mapping[str, Sequence[float]] | None = None,
        max_attempts: int = 100,
    ):
        self._schema = schema
        self._bias = sample_bias
        self._max_attempts = max_attempts
        self._grids = [spec.grid() for spec in schema.properties]
        samples = value_samples if value_samples is not None else (schema.coverage_samples or {})
        self._samples = [
            np.array(sorted({spec.snap(v) for v in samples[spec.name]}))
            if samples.get(spec.name)
            else None
            for spec in schema.properties
        ]
        self._pools: list[tuple[list[float], list[float] | None]] = [
            (grid.tolist(), None if picks is None else picks.tolist())
            for grid, picks in zip(self._grids, self._samples, strict=True)
        ]

    def valid(self, values: Sequence[float]) -> bool:
        return self._schema.satisfies_constraints(values)

    def _pick(self, uniforms: Sequence[float]) -> list[float]:
        values: list[float] = []
        for index, (grid, samples) in enumerate(self._pools):
            pool = samples if samples is not None and uniforms[2 * index] < self._bias else grid
            values.append(pool[int(uniforms[2 * index + 1] * len(pool))])
        return values

    def draw(self, rng: np.random.Generator) -> list[float]:
        return self._pick(rng.random(2 * len(self._pools)).tolist())

    def random_instance(
        self, rng: np.random.Generator, attempts: int | None = None
    ) -> ContextInstance | None:
        """First valid draw out of ``attempts``; the uniforms for all of them are drawn at once."""
        rows = rng.random((attempts or self._max_attempts, 2 * len(self._pools))).tolist()
        for uniforms in rows:
            values = self._pick(uniforms)
            if self.valid(values):
                return tuple(values)
        return None

    def initial_instance(self, rng: np.random.Generator) -> ContextInstance:
        """A valid instance; falls back to repair, then to a capped grid scan."""
        found = self.random_instance(rng)
        if found is not None:
            return found
        repaired = self.repair(self.draw(rng))
        if repaired is not None:
            return repaired
        return find_valid_instance(
            self._schema, itertools.islice(iter_grid(self._schema), DEFAULT_ENUMERATION_CAP)
        )

    def repair(self, values: Sequence[float]) -> ContextInstance | None:
        """Nearest valid point that differs from ``values`` in a single coordinate."""
        best: tuple[float, ContextInstance] | None = None
        columns = zip(self._schema.properties, self._grids, strict=True)
        for index, (spec, grid) in enumerate(columns):
            for position in np.argsort(np.abs(grid - values[index]), kind="stable"):
                candidate = list(values)
                candidate[index] = float(grid[position])
                if self._schema.satisfies_constraints(candidate):
                    change = spec.normalize(candidate[index]) - spec.normalize(values[index])
                    if best is None or abs(change) < best[0]:
                        best = (abs(change), tuple(candidate))
                    break
        return None if best is None else best[1]

    def nudge(self, inst: ContextInstance, rng: np.random.Generator) -> ContextInstance:
        """Move one property a few grid steps up or down."""
        pick, size, sign = rng.random(3).tolist()
        index = int(pick * len(inst))
        spec = self._schema.properties[index]
        if spec.cardinality == 1:
            return inst
        reach = max(1, spec.cardinality // 10)
        steps = (int(size * reach) + 1) * (1 if sign < 0.5 else -1)
        current = round(spec.grid_index(inst[index]))
        target = min(max(current + steps, 0), spec.cardinality - 1)
        if target == current:
            target = min(max(current - steps, 0), spec.cardinality - 1)
        values = list(inst)
        values[index] = spec.value_at(target)
        return tuple(values)


class _FlowState:
    """Mutable working flow with the bookkeeping needed for incremental L(f)."""

    def __init__(
        self,
        schema: ContextSchema,
        instances: list[ContextInstance],
        target: frozenset[ValuePair],
        avoid: frozenset[ContextInstance],
        ep: EpConfig,
    ):
        self._lowers = [spec.lower for spec in schema.properties]
        self._spans = [spec.span or 1.0 for spec in schema.properties]
        self._ep = ep
        self._pairs: dict[ContextInstance, frozenset[ValuePair]] = {}
        self.instances = instances
        self.target = target
        self.avoid = avoid
        self.coords = [self.coordinates(inst) for inst in instances]
        self.d = [math.dist(a, b) for a, b in itertools.pairwise(self.coords)]
        self.states = window_states(self.d, ep)
        self.pair_counts: Counter[ValuePair] = Counter()
        for inst in instances:
            self.pair_counts.update(self.target_pairs(inst))
        self.overlap = sum(1 for inst in instances if inst in avoid)

    def coordinates(self, inst: ContextInstance) -> tuple[float, ...]:
        return tuple(
            (v - lower) / span
            for v, lower, span in zip(inst, self._lowers, self._spans, strict=True)
        )

    def target_pairs(self, inst: ContextInstance) -> frozenset[ValuePair]:
        pairs = self._pairs.get(inst)
        if pairs is None:
            pairs = frozenset(pair for pair in instance_pairs(inst) if pair in self.target)
            self._pairs[inst] = pairs
        return pairs

    @property
    def distinct(self) -> int:
        return len(self.pair_counts)

    @property
    def windows(self) -> int:
        return self.states[-1][0]

    def moved_distances(self, position: int, coords: tuple[float, ...]) -> list[float]:
        d = list(self.d)
        if position > 0:
            d[position - 1] = math.dist(self.coords[position - 1], coords)
        if position < len(self.instances) - 1:
            d[position] = math.dist(coords, self.coords[position + 1])
        return d

    def windows_after(self, position: int, d: Sequence[float]) -> int:
        """Window count of ``d``, the distances after moving ``position``."""
        first = max(position - 1, 0)
        last = min(position, len(d) - 1)
        return recount_windows(d, self._ep, self.states, first, last)

    def distinct_after(self, position: int, inst: ContextInstance) -> int:
        old = self.target_pairs(self.instances[position])
        new = self.target_pairs(inst)
        gained = sum(1 for pair in new - old if self.pair_counts[pair] == 0)
        lost = sum(1 for pair in old - new if self.pair_counts[pair] == 1)
        return self.distinct + gained - lost

    def overlap_after(self, position: int, inst: ContextInstance) -> int:
        return self.overlap - (self.instances[position] in self.avoid) + (inst in self.avoid)

    def apply(self, position: int, inst: ContextInstance) -> None:
        old = self.instances[position]
        self.overlap = self.overlap_after(position, inst)
        self.pair_counts.subtract(self.target_pairs(old))
        self.pair_counts.update(self.target_pairs(inst))
        self.pair_counts = +self.pair_counts
        coords = self.coordinates(inst)
        self.d = self.moved_distances(position, coords)
        self.states = window_states(self.d, self._ep)
        self.coords[position] = coords
        self.instances[position] = inst


class TabuLocalSearch:
    """Single-instance-move tabu search maximising L(f).

    Keeps ``moves`` (one record per taken move) when ``record_moves`` is set.
    """

    def __init__(
        self,
        distribution: RealityDistribution | None = None,
        value_samples: Mapping[str, Sequence[float]] | None = None,
        record_moves: bool = False,
    ):
        self.distribution = distribution
        self.value_samples = value_samples
        self.record_moves = record_moves
        self.moves: list[MoveRecord] = []

    def __call__(
        self,
        schema: ContextSchema,
        universe: CoverageUniverse,
        cfg: SearchConfig,
        rng: np.random.Generator,
        avoid: frozenset[ContextInstance] = frozenset(),
        flow_id: str = "aeq",
    ) -> ContextFlow:
        self.moves = []
        sampler = ValueSampler(schema, cfg.sample_bias, self.value_samples)
        state = _FlowState(
            schema,
            [sampler.initial_instance(rng) for _ in range(cfg.flow_length)],
            universe.uncovered,
            avoid,
            cfg.ep,
        )
        weights = cfg.weights.local
        windows_cap = max_windows(cfg.flow_length)
        target_size = len(state.target)
        use_reality = self.distribution is not None and weights.w_re > 0

        def score(distinct: int, windows: int, instances: Sequence[ContextInstance]) -> float:
            coverage = distinct / target_size if target_size else 1.0
            value = weights.w_cov * coverage + weights.w_ep * windows / windows_cap
            if use_reality and self.distribution is not None:
                flow = ContextFlow(id=flow_id, instances=tuple(instances))
                value += weights.w_re * reality_score(schema, flow, self.distribution)
            return value

        limit = cfg.max_memory_overlap
        current = score(state.distinct, state.windows, state.instances)
        best = list(state.instances)
        best_score = current
        best_ok = state.overlap <= limit
        tabu_until: dict[MoveKey, int] = {}
        tenure = cfg.tenure

        for iteration in range(cfg.local_iterations):
            chosen: tuple[float, int, ContextInstance, bool] | None = None
            for position, inst in self._neighbourhood(state, sampler, cfg, rng):
                d = state.moved_distances(position, state.coordinates(inst))
                windows = state.windows_after(position, d)
                if use_reality:
                    moved = list(state.instances)
                    moved[position] = inst
                    value = score(state.distinct_after(position, inst), windows, moved)
                else:
                    value = score(state.distinct_after(position, inst), windows, ())
                is_tabu = tabu_until.get((position, inst), -1) >= iteration
                aspirated = is_tabu and cfg.aspiration and value > best_score
                if is_tabu and not aspirated:
                    continue
                if chosen is None or value > chosen[0]:
                    chosen = (value, position, inst, aspirated)
            if chosen is None:
                continue
            value, position, inst, aspirated = chosen
            old = state.instances[position]
            state.apply(position, inst)
            tabu_until[(position, inst)] = iteration + tenure
            tabu_until[(position, old)] = iteration + tenure
            current = value
            if self.record_moves:
                self.moves.append(MoveRecord(iteration, position, inst, value, aspirated))
            if state.overlap <= limit and (not best_ok or current > best_score):
                best = list(state.instances)
                best_score = current
                best_ok = True

        log.debug(
            "local_search_finished",
            flow_id=flow_id,
            iterations=cfg.local_iterations,
            score=round(best_score, 6),
            within_overlap=best_ok,
        )
        return ContextFlow(id=flow_id, instances=tuple(best))

    def _neighbourhood(
        self,
        state: _FlowState,
        sampler: ValueSampler,
        cfg: SearchConfig,
        rng: np.random.Generator,
    ) -> list[tuple[int, ContextInstance]]:
        limit = cfg.max_memory_overlap
        forced = state.overlap > limit
        positions = [i for i, inst in enumerate(state.instances) if inst in state.avoid]
        candidates: list[tuple[int, ContextInstance]] = []
        draws = rng.random((cfg.neighborhood, 2)).tolist()
        for pick, coin in draws:
            if forced:
                position = positions[int(pick * len(positions))]
            else:
                position = int(pick * len(state.instances))
            old = state.instances[position]
            inst: ContextInstance | None
            if coin < 0.5:
                inst = sampler.random_instance(rng, attempts=10)
            else:
                inst = sampler.nudge(old, rng)
                if not sampler.valid(inst):
                    inst = None
            if inst is None or inst == old:
                continue
            if forced and inst in state.avoid:
                continue
            if not forced and state.overlap_after(position, inst) > limit:
                continue
            candidates.append((position, inst))
        return candidates


def tabu_local_search(
    schema: ContextSchema,
    universe: CoverageUniverse,
    cfg: SearchConfig,
    rng: np.random.Generator,
    avoid: frozenset[ContextInstance] = frozenset(),
    *,
    flow_id: str = "aeq",
    distribution: RealityDistribution | None = None,
) -> ContextFlow:
    return TabuLocalSearch(distribution=distribution)(schema, universe, cfg, rng, avoid, flow_id)
