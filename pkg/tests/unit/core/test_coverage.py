from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quake.core.coverage import (
    build_pairwise_universe,
    coverage_global,
    coverage_local,
    instance_pairs,
    mark_covered,
    property_domains,
)
from quake.core.models.context import ContextFlow, ContextSchema
from quake.core.models.coverage import PAIRWISE, CoverageUniverse, ValuePair
from quake.errors import CapacityError, ConfigError
from quake.templates.registry import read_template

WEB = ContextSchema.model_validate_json(read_template("schema"))
COARSE = build_pairwise_universe(WEB, WEB.coverage_samples)


def _oracle_pairs(schema: ContextSchema, samples: dict[str, list[float]]) -> set[ValuePair]:
    """Pairs over the samples that extend to a valid instance on the full grids."""
    grids = [[float(v) for v in spec.grid()] for spec in schema.properties]
    domains = [sorted(float(v) for v in samples[spec.name]) for spec in schema.properties]
    pairs: set[ValuePair] = set()
    for a, b in itertools.combinations(range(schema.arity), 2):
        (rest,) = set(range(schema.arity)) - {a, b}
        for va in domains[a]:
            for vb in domains[b]:
                for vr in grids[rest]:
                    values = [0.0] * schema.arity
                    values[a], values[b], values[rest] = va, vb, vr
                    if schema.satisfies_constraints(values):
                        pairs.add(ValuePair(a, va, b, vb))
                        break
    return pairs


def _flow(*instances: tuple[float, ...], flow_id: str = "f") -> ContextFlow:
    return ContextFlow(id=flow_id, instances=tuple(tuple(float(v) for v in i) for i in instances))


def test_two_binary_properties_give_four_pairs(binary_schema):
    universe = build_pairwise_universe(binary_schema)

    assert universe.criterion_id == PAIRWISE
    assert len(universe.pairs) == 4
    assert universe.covered == frozenset()


def test_constraints_filter_infeasible_pairs(ordered_schema):
    universe = build_pairwise_universe(ordered_schema)

    assert len(universe.pairs) == 10
    assert ValuePair(0, 1.0, 1, 2.0) not in universe.pairs


def test_coarse_web_universe_matches_brute_force():
    assert COARSE.pairs == _oracle_pairs(WEB, WEB.coverage_samples or {})
    assert len(COARSE.pairs) == 34


def test_coarse_web_universe_excludes_more_files_than_requests():
    assert ValuePair(0, 1.0, 1, 5.0) not in COARSE.pairs
    assert ValuePair(0, 10.0, 1, 500.0) not in COARSE.pairs
    # Dispersion pairs stay feasible because density can be chosen freely.
    assert ValuePair(1, 500.0, 2, 0.0) in COARSE.pairs


def test_property_domains_use_samples_then_grid(binary_schema):
    assert property_domains(binary_schema, {"a": [1, 0, 1]}) == [(0.0, 1.0), (0.0, 1.0)]


def test_property_domains_reject_bad_samples(binary_schema):
    with pytest.raises(ConfigError, match="unknown properties: z"):
        property_domains(binary_schema, {"z": [0]})
    with pytest.raises(ConfigError, match="not on the grid"):
        property_domains(binary_schema, {"a": [0.5]})


def test_universe_over_cap_is_a_capacity_error():
    with pytest.raises(CapacityError, match="coverage_samples"):
        build_pairwise_universe(WEB, None, cap=10_000)


def test_instance_pairs_lists_every_property_pair():
    assert list(instance_pairs((1.0, 2.0, 3.0))) == [
        ValuePair(0, 1.0, 1, 2.0),
        ValuePair(0, 1.0, 2, 3.0),
        ValuePair(1, 2.0, 2, 3.0),
    ]


def test_coverage_local_counts_realized_universe_pairs():
    assert coverage_local(COARSE, _flow((1, 1, 0))) == 3
    # Every value is off the coarse samples.
    assert coverage_local(COARSE, _flow((12, 3, 0.3))) == 0


def test_coverage_global_examples():
    f1 = _flow((1, 1, 0), flow_id="f1")
    f2 = _flow((1000, 500, 1), flow_id="f2")

    assert coverage_global(COARSE, []) == 0
    assert coverage_global(COARSE, [f1]) == coverage_local(COARSE, f1)
    assert coverage_global(COARSE, [f1, f2]) == coverage_local(COARSE, f1) + coverage_local(
        COARSE, f2
    )


def test_mark_covered_is_idempotent():
    flow = _flow((100, 50, 0.5))

    once = mark_covered(COARSE, [flow])
    twice = mark_covered(once, [flow])

    assert once == twice
    assert len(once.covered) == 3
    remainder = CoverageUniverse(criterion_id=once.criterion_id, pairs=once.uncovered)
    assert coverage_local(remainder, flow) == 0


def test_marking_every_pair_completes_the_universe():
    instances = []
    for pair in sorted(COARSE.pairs):
        values = [1000.0, 1.0, 0.0]
        values[pair.prop_a], values[pair.prop_b] = pair.val_a, pair.val_b
        instances.append(tuple(values))

    universe = mark_covered(COARSE, [ContextFlow(id="all", instances=tuple(instances))])

    assert universe.complete
    assert universe.uncovered == frozenset()


def test_covered_pairs_must_belong_to_the_universe():
    with pytest.raises(ValueError):
        CoverageUniverse(
            criterion_id=PAIRWISE,
            pairs=frozenset(),
            covered=frozenset({ValuePair(0, 1.0, 1, 1.0)}),
        )


sample_instances = st.tuples(
    st.sampled_from([1.0, 10.0, 100.0, 1000.0]),
    st.sampled_from([1.0, 5.0, 50.0, 500.0]),
    st.sampled_from([0.0, 0.5, 1.0]),
)


@settings(max_examples=50, deadline=None)
@given(
    first=st.lists(sample_instances, min_size=1, max_size=6),
    second=st.lists(sample_instances, min_size=1, max_size=6),
)
def test_concatenation_never_loses_coverage(first, second):
    f1 = ContextFlow(id="f1", instances=tuple(first))
    f2 = ContextFlow(id="f2", instances=tuple(second))
    joined = ContextFlow(id="j", instances=tuple(first + second))

    assert coverage_local(COARSE, joined) >= max(
        coverage_local(COARSE, f1), coverage_local(COARSE, f2)
    )
    assert coverage_local(COARSE, joined) == coverage_global(COARSE, [f1, f2])
