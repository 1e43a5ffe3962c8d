"""Local (per-flow) and global (per-suite) objective functions.

Every term is normalised to [0, 1] so the weights stay commensurable:
coverage is a fraction of the target pairs, EP occurrences are divided by the
most windows a flow of that length can hold, and the shape term by the number
of shape classes.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from quake.core.coverage import instance_pairs
from quake.core.metric import (
    MIN_PROFILE_LENGTH,
    classify_shape,
    count_windows,
    origin_distance_series,
    transition_distances,
)
from quake.core.models.context import ContextFlow, ContextSchema, EpConfig
from quake.core.models.coverage import CoverageUniverse, ValuePair
from quake.core.models.enums import ShapeClass
from quake.core.models.search import (
    GlobalObjectiveWeights,
    LocalObjectiveWeights,
    RealityDistribution,
)
from quake.errors import ConfigError

SHAPE_CLASSES = 3


def max_windows(flow_length: int) -> int:
    return max(1, (flow_length - 1) // 2)


def flow_pairs(flow: ContextFlow) -> set[ValuePair]:
    pairs: set[ValuePair] = set()
    for inst in flow.instances:
        pairs.update(instance_pairs(inst))
    return pairs


def normalized_coverage(universe: CoverageUniverse, flow: ContextFlow) -> float:
    target = universe.uncovered
    if not target:
        return 1.0
    return len(flow_pairs(flow) & target) / len(target)


def normalized_ep(schema: ContextSchema, flow: ContextFlow, ep_config: EpConfig) -> float:
    if len(flow) < MIN_PROFILE_LENGTH:
        return 0.0
    return count_windows(transition_distances(schema, flow), ep_config) / max_windows(len(flow))


def reality_score(
    schema: ContextSchema, flow: ContextFlow, distribution: RealityDistribution
) -> float:
    """One minus the mean total-variation distance to the reference mass."""
    distances: list[float] = []
    for name, mass in distribution.masses.items():
        if name not in schema.names:
            raise ConfigError(f"reality distribution references unknown property '{name}'")
        spec = schema.spec(name)
        if len(mass) != spec.cardinality:
            raise ConfigError(
                f"reality mass for '{name}' has {len(mass)} entries; "
                f"its grid has {spec.cardinality} points"
            )
        column = schema.names.index(name)
        indices = [round(spec.grid_index(inst[column])) for inst in flow.instances]
        empirical = np.bincount(indices, minlength=spec.cardinality) / len(flow)
        distances.append(0.5 * float(np.abs(empirical - np.asarray(mass)).sum()))
    return 1.0 - float(np.mean(distances))


def local_objective(
    schema: ContextSchema,
    flow: ContextFlow,
    universe: CoverageUniverse,
    weights: LocalObjectiveWeights,
    ep_config: EpConfig,
    distribution: RealityDistribution | None = None,
) -> float:
    """L(f) over the universe's uncovered pairs."""
    value = weights.w_cov * normalized_coverage(universe, flow)
    value += weights.w_ep * normalized_ep(schema, flow, ep_config)
    if distribution is not None:
        value += weights.w_re * reality_score(schema, flow, distribution)
    return value


class SuiteScorer:
    """G(sf) with per-flow facts cached across calls."""

    def __init__(
        self,
        schema: ContextSchema,
        universe: CoverageUniverse,
        weights: GlobalObjectiveWeights,
        ep_config: EpConfig,
        lambda_size: float,
    ):
        self._schema = schema
        self._universe = universe
        self._weights = weights
        self._ep_config = ep_config
        self._lambda = lambda_size
        self._facts: dict[ContextFlow, tuple[frozenset[ValuePair], ShapeClass]] = {}

    def facts(self, flow: ContextFlow) -> tuple[frozenset[ValuePair], ShapeClass]:
        cached = self._facts.get(flow)
        if cached is None:
            pairs = frozenset(flow_pairs(flow)) & self._universe.pairs
            shape = ShapeClass.UNCLASSIFIED
            if len(flow) >= MIN_PROFILE_LENGTH:
                series = origin_distance_series(self._schema, flow)
                shape = classify_shape(series, self._ep_config.shape)
            cached = (pairs, shape)
            self._facts[flow] = cached
        return cached

    def score(self, solution: Sequence[ContextFlow]) -> float:
        if not solution:
            return 0.0
        covered: set[ValuePair] = set()
        shapes: set[ShapeClass] = set()
        for flow in solution:
            pairs, shape = self.facts(flow)
            covered |= pairs
            shapes.add(shape)
        shapes.discard(ShapeClass.UNCLASSIFIED)
        coverage = len(covered) / len(self._universe.pairs) if self._universe.pairs else 0.0
        return (
            self._weights.w_cov * coverage
            + self._weights.w_shape * len(shapes) / SHAPE_CLASSES
            - self._lambda * len(solution)
        )


def global_objective(
    schema: ContextSchema,
    solution: Sequence[ContextFlow],
    universe: CoverageUniverse,
    weights: GlobalObjectiveWeights,
    ep_config: EpConfig,
    lambda_size: float = 0.01,
) -> float:
    return SuiteScorer(schema, universe, weights, ep_config, lambda_size).score(solution)
