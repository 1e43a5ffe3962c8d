"""Acceptance runs at full budget: the shipped defaults end to end and large randomized suites.

These sit in the integration tier because they take minutes, not seconds:
``uv run pytest -m integration --no-cov tests/integration/test_acceptance.py``.
"""

from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quake.adapters.loaders.yaml_config_loader import YamlConfigLoader
from quake.core.coverage import build_pairwise_universe, coverage_global, property_domains
from quake.core.fuzzy import Fuzzifier, fuzzify
from quake.core.global_search import generate_suite
from quake.core.metric import distance
from quake.core.models.context import ContextSchema
from quake.core.models.coverage import ValuePair
from quake.core.models.enums import CellOutcome, FaultGroup
from quake.core.models.mutation import MutationPlan
from quake.core.models.policy import (
    CACHE_SIZE_MAX,
    CACHE_SIZE_MIN,
    SERVERS_MAX,
    SERVERS_MIN,
    Variant,
)
from quake.core.mutation import (
    MAJORITY_THRESHOLD,
    apply_mutant,
    build_report,
    generate_mutants,
    run_experiment,
)
from quake.core.policy_parser import parse_policy
from quake.core.simulator import step
from quake.templates.registry import read_template

pytestmark = pytest.mark.integration

WEB = ContextSchema.model_validate_json(read_template("schema"))
POLICY = parse_policy(read_template("policy"), WEB.names)
FUZZIFIER = Fuzzifier(WEB)
# The reference policy and every enumerable mutant of it, each with its simulator hooks.
POLICIES = [
    apply_mutant(POLICY, WEB, mutant)
    for mutant in generate_mutants(POLICY, WEB, MutationPlan.exhaustive(control=True))
]

web_points = st.tuples(
    st.integers(1, 1000).map(float),
    st.integers(1, 1000).map(float),
    st.integers(0, 10).map(lambda i: i / 10),
)
variants = st.one_of(
    st.builds(Variant, data_servers=st.integers(SERVERS_MIN, SERVERS_MAX)),
    st.builds(
        Variant,
        cache_exists=st.just(True),
        cache_size=st.integers(CACHE_SIZE_MIN, CACHE_SIZE_MAX),
        cache_validity_s=st.integers(1, 600),
        data_servers=st.integers(SERVERS_MIN, SERVERS_MAX),
    ),
)


def _feasible_pairs(schema: ContextSchema) -> frozenset[ValuePair]:
    """Sampled value pairs that some full grid instance completes."""
    domains = property_domains(schema, schema.coverage_samples)
    grids = [[float(v) for v in spec.grid()] for spec in schema.properties]
    pairs: set[ValuePair] = set()
    for a, b in itertools.combinations(range(len(domains)), 2):
        rest = [i for i in range(len(domains)) if i not in (a, b)]
        for va, vb in itertools.product(domains[a], domains[b]):
            for choice in itertools.product(*(grids[i] for i in rest)):
                values = [0.0] * len(domains)
                values[a], values[b] = va, vb
                for index, value in zip(rest, choice, strict=True):
                    values[index] = value
                if schema.satisfies_constraints(values):
                    pairs.add(ValuePair(a, va, b, vb))
                    break
    return frozenset(pairs)


@pytest.fixture(scope="module")
def default_run(tmp_path_factory):
    """One ``generate`` with the shipped config, schema and seed."""
    path = tmp_path_factory.mktemp("defaults") / "quake.yaml"
    path.write_text(read_template("config"), encoding="utf-8")
    config = YamlConfigLoader().load(path)
    schema = config.apply_to(WEB)
    cfg = config.search_config(schema)
    universe = build_pairwise_universe(schema, schema.coverage_samples)
    result = generate_suite(schema, universe, cfg, distribution=config.reality_distribution())
    return config, schema, cfg, universe, result


def test_defaults_cover_the_whole_feasible_pair_universe(default_run):
    _, schema, cfg, universe, result = default_run

    assert (cfg.flow_length, cfg.tabu_tenure, cfg.seed) == (60, 30, 42)
    assert universe.pairs == _feasible_pairs(schema)
    assert len(universe.pairs) == 34
    assert ValuePair(0, 1.0, 1, 5.0) not in universe.pairs
    assert result.universe_size == 34
    assert result.pairs_covered == 34
    assert coverage_global(universe, result.solution) == 34
    for flow in result.solution:
        assert len(flow) == 60
        assert all(schema.satisfies_constraints(instance) for instance in flow.instances)


def test_scaled_mutation_experiment(default_run):
    config, schema, _, _, result = default_run
    flows = result.solution
    suites = {f"suite{k + 1}": flows[k::3] for k in range(3) if flows[k::3]}
    policy = parse_policy(read_template("policy"), schema.names)
    mutants = generate_mutants(policy, schema, config.mutation_plan)

    matrix = run_experiment(
        schema, policy, config.fuzzy_sets, mutants, suites, config.initial, jobs=1
    )
    report = build_report(matrix)

    assert report.mutants == 45
    assert report.aeqs == len(flows)
    f1 = next(stats for stats in report.groups if stats.group is FaultGroup.F1)
    assert f1.killed == f1.mutants == 3
    # Mutants no AEQ kills are exactly the diagnosed survivors.
    unkilled = {row.mutant.id for row in matrix.rows if row.kills == 0} - set(report.errored)
    assert {survivor.mutant_id for survivor in report.survivors} == unkilled
    if report.raw_kill_score < 0.9:
        assert report.survivors
    candidates = report.mutants - len(unkilled) - len(report.errored)
    assert report.killed == candidates
    majority = sum(
        1
        for row in matrix.rows
        if sum(cell.outcome is CellOutcome.KILLED for cell in row.cells) / len(row.cells)
        > MAJORITY_THRESHOLD
    )
    assert report.killed_by_majority == majority
    assert report.suites == tuple(suites)


@settings(max_examples=10_000, deadline=None)
@given(a=web_points, b=web_points, c=web_points)
def test_distance_is_a_metric_over_many_points(a, b, c):
    assert distance(WEB, a, a) == 0.0
    assert distance(WEB, a, b) == distance(WEB, b, a)
    assert distance(WEB, a, c) <= distance(WEB, a, b) + distance(WEB, b, c) + 1e-9


@settings(max_examples=10_000, deadline=None)
@given(mutated=st.sampled_from(POLICIES), state=variants, instance=web_points)
def test_any_policy_step_yields_a_valid_variant(mutated, state, instance):
    policy, hooks = mutated

    after, _ = step(policy, FUZZIFIER, state, instance, hooks)

    # Construction re-runs the invariants.
    rebuilt = Variant(
        cache_exists=after.cache_exists,
        cache_size=after.cache_size,
        cache_validity_s=after.cache_validity_s,
        data_servers=after.data_servers,
    )
    if rebuilt.cache_exists:
        assert rebuilt.cache_size > 0
        assert rebuilt.cache_validity_s > 0


@settings(max_examples=1_000, deadline=None)
@given(
    lower=st.integers(-1000, 1000),
    stride=st.integers(1, 50),
    size=st.integers(2, 40),
    data=st.data(),
)
def test_fuzzification_ignores_any_affine_rescaling(lower, stride, size, data):
    index = data.draw(st.integers(0, size - 1))
    unit = ContextSchema.model_validate(
        {"properties": [{"name": "x", "kind": "integer", "lower": 0, "upper": size - 1}]}
    )
    scaled = ContextSchema.model_validate(
        {
            "properties": [
                {
                    "name": "x",
                    "kind": "integer",
                    "lower": lower,
                    "upper": lower + stride * (size - 1),
                    "step": stride,
                }
            ]
        }
    )

    small = fuzzify(None, unit, (float(index),))["x"]
    large = fuzzify(None, scaled, (float(lower + stride * index),))["x"]

    assert small[0] is large[0]
    assert small[1] == pytest.approx(large[1])
