"""Pairwise coverage criterion over context instances."""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Mapping, Sequence

import attrs
import structlog

from quake.core.context import DEFAULT_ENUMERATION_CAP
from quake.core.models.context import ContextFlow, ContextSchema
from quake.core.models.coverage import PAIRWISE, CoverageUniverse, ValuePair
from quake.errors import CapacityError, ConfigError

log: structlog.stdlib.BoundLogger = structlog.get_logger(__name__)


def property_domains(
    schema: ContextSchema,
    value_samples: Mapping[str, Sequence[float]] | None = None,
) -> list[tuple[float, ...]]:
    """Per-property values to pair up: the samples where given, else the full grid."""
    samples = value_samples or {}
    unknown = sorted(set(samples) - set(schema.names))
    if unknown:
        raise ConfigError(f"value samples reference unknown properties: {', '.join(unknown)}")
    domains: list[tuple[float, ...]] = []
    for spec in schema.properties:
        if spec.name in samples:
            off_grid = [
                v for v in samples[spec.name] if not spec.in_bounds(v) or not spec.is_aligned(v)
            ]
            if off_grid:
                raise ConfigError(f"value samples {off_grid} are not on the grid of '{spec.name}'")
            values = sorted({spec.snap(v) for v in samples[spec.name]})
        else:
            values = [float(v) for v in spec.grid()]
        domains.append(tuple(values))
    return domains


def instance_pairs(values: Sequence[float]) -> Iterator[ValuePair]:
    for a, b in itertools.combinations(range(len(values)), 2):
        yield ValuePair(a, values[a], b, values[b])


class _Feasibility:
    """Decides whether some valid full instance extends a property-value pair."""

    def __init__(self, schema: ContextSchema, cap: int):
        self._schema = schema
        self._cap = cap
        self._referenced = frozenset(
            schema.names.index(name) for c in schema.compiled_constraints for name in c.names
        )
        self._grids = [tuple(float(v) for v in spec.grid()) for spec in schema.properties]
        self._memo: dict[tuple[tuple[int, float], ...], bool] = {}

    def __call__(self, pair: ValuePair) -> bool:
        if not self._schema.compiled_constraints:
            return True
        fixed = {pair.prop_a: pair.val_a, pair.prop_b: pair.val_b}
        key = tuple(sorted((i, v) for i, v in fixed.items() if i in self._referenced))
        if key not in self._memo:
            self._memo[key] = self._extend(dict(key))
        return self._memo[key]

    def _extend(self, fixed: dict[int, float]) -> bool:
        free = sorted(self._referenced - set(fixed))
        size = 1
        for index in free:
            size *= len(self._grids[index])
        if size > self._cap:
            raise CapacityError(
                f"Feasibility search would enumerate {size} extensions", cap=self._cap
            )
        base = [spec.lower for spec in self._schema.properties]
        for index, value in fixed.items():
            base[index] = value
        for choice in itertools.product(*(self._grids[index] for index in free)):
            for index, value in zip(free, choice, strict=True):
                base[index] = value
            if self._schema.satisfies_constraints(base):
                return True
        return False


def build_pairwise_universe(
    schema: ContextSchema,
    value_samples: Mapping[str, Sequence[float]] | None = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> CoverageUniverse:
    domains = property_domains(schema, value_samples)
    candidates = sum(
        len(domains[a]) * len(domains[b])
        for a, b in itertools.combinations(range(len(domains)), 2)
    )
    if candidates > cap:
        raise CapacityError(
            f"Pairwise universe needs {candidates} candidate pairs; "
            "pass value_samples (coverage_samples) to coarsen the grids",
            cap=cap,
        )
    feasible = _Feasibility(schema, cap)
    pairs = frozenset(
        pair
        for a, b in itertools.combinations(range(len(domains)), 2)
        for pair in (ValuePair(a, va, b, vb) for va in domains[a] for vb in domains[b])
        if feasible(pair)
    )
    log.debug(
        "universe_built",
        criterion=PAIRWISE,
        candidates=candidates,
        pairs=len(pairs),
    )
    return CoverageUniverse(criterion_id=PAIRWISE, pairs=pairs)


def pairs_realized(
    universe: CoverageUniverse, flows: Iterable[ContextFlow]
) -> frozenset[ValuePair]:
    realized: set[ValuePair] = set()
    for flow in flows:
        for inst in flow.instances:
            realized.update(instance_pairs(inst))
    return frozenset(realized) & universe.pairs


def coverage_local(universe: CoverageUniverse, flow: ContextFlow) -> int:
    return len(pairs_realized(universe, [flow]))


def coverage_global(universe: CoverageUniverse, flows: Iterable[ContextFlow]) -> int:
    return len(pairs_realized(universe, flows))


def mark_covered(universe: CoverageUniverse, flows: Iterable[ContextFlow]) -> CoverageUniverse:
    return attrs.evolve(universe, covered=universe.covered | pairs_realized(universe, flows))
