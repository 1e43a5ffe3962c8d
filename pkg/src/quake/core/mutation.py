"""Mutant generation, the kill-matrix experiment, and its summary.

Mutants are declarative transforms interpreted through the simulator's
instrumentation seams (F1, F2) or applied to a copy of the policy (F3, F4).
"""

from __future__ import annotations

import itertools
from collections.abc import Iterator, Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor

import attrs
import msgspec
import structlog
from msgspec import structs

from quake.core.fuzzy import Fuzzified, Fuzzifier
from quake.core.models.context import ContextFlow, ContextInstance, ContextSchema
from quake.core.models.enums import ADJECTIVE_ORDER, Adjective, CellOutcome, FaultGroup
from quake.core.models.mutation import (
    THEN_SLOT,
    AdjectiveMap,
    AeqColumn,
    GroupStats,
    Identity,
    KillCell,
    KillMatrix,
    MutantRow,
    MutantSpec,
    MutationPlan,
    MutationReport,
    ReplaceSlot,
    ScaleProperty,
    SuiteKills,
    SurvivorDiagnosis,
    SwapProperties,
    SwapSlots,
    Transform,
    when_slot,
)
from quake.core.models.policy import AdaptationPolicy, FuzzySets, Rule, Variant, VariantFlow
from quake.core.simulator import Instrumentation, run, trace_equal
from quake.errors import PlanError

log: structlog.stdlib.BoundLogger = structlog.get_logger(__name__)

F1_SCALE_FACTORS = (10.0, 0.1)
MAJORITY_THRESHOLD = 0.6
CONTROL_ID = "control"
MUTANTS_FILE = "mutants.json"


# Instrumentation hooks are plain callables so that worker processes can rebuild them.


@attrs.frozen(slots=True)
class _SwapValues:
    a: int
    b: int

    def __call__(self, instance: ContextInstance) -> ContextInstance:
        values = list(instance)
        values[self.a], values[self.b] = values[self.b], values[self.a]
        return tuple(values)


@attrs.frozen(slots=True)
class _ScaleValue:
    index: int
    factor: float

    def __call__(self, instance: ContextInstance) -> ContextInstance:
        values = list(instance)
        values[self.index] = values[self.index] * self.factor
        return tuple(values)


@attrs.frozen(slots=True)
class _MapAdjectives:
    prop: str
    mapping: Mapping[Adjective, Adjective]

    def __call__(self, fuzzified: Fuzzified) -> Fuzzified:
        adjective, degree = fuzzified[self.prop]
        rewritten = dict(fuzzified)
        rewritten[self.prop] = (self.mapping.get(adjective, adjective), degree)
        return rewritten


def rule_slots(policy: AdaptationPolicy) -> list[tuple[int, str, Adjective]]:
    """Every adjective occurrence as (rule index, slot name, adjective)."""
    slots: list[tuple[int, str, Adjective]] = []
    for index, rule in enumerate(policy.rules):
        slots.extend(
            (index, when_slot(position), adjective)
            for position, adjective in enumerate(rule.when_adjectives)
        )
        slots.append((index, THEN_SLOT, rule.utility_adjective))
    return slots


def _slot_adjective(policy: AdaptationPolicy, rule: int, slot: str) -> Adjective:
    if not 0 <= rule < len(policy.rules):
        raise PlanError(f"rule index {rule} does not exist (policy has {len(policy.rules)} rules)")
    target = policy.rules[rule]
    if slot == THEN_SLOT:
        return target.utility_adjective
    prefix, _, position = slot.partition(":")
    if prefix != "when" or not position.isdigit() or int(position) >= len(target.when_adjectives):
        raise PlanError(f"rule {rule} has no slot '{slot}'")
    return target.when_adjectives[int(position)]


def _with_slot(rule: Rule, slot: str, adjective: Adjective) -> Rule:
    if slot == THEN_SLOT:
        return structs.replace(rule, utility_adjective=adjective)
    position = int(slot.partition(":")[2])
    adjectives = list(rule.when_adjectives)
    adjectives[position] = adjective
    return structs.replace(rule, when_adjectives=tuple(adjectives))


def _f1(schema: ContextSchema) -> Iterator[Transform]:
    for a, b in itertools.combinations(schema.names, 2):
        yield SwapProperties(prop_a=a, prop_b=b)
    for name in schema.names:
        for factor in F1_SCALE_FACTORS:
            yield ScaleProperty(prop=name, factor=factor)


def _f2(schema: ContextSchema) -> Iterator[Transform]:
    for name in schema.names:
        for targets in itertools.product(ADJECTIVE_ORDER, repeat=len(ADJECTIVE_ORDER)):
            if targets == ADJECTIVE_ORDER:
                continue
            yield AdjectiveMap(prop=name, mapping=dict(zip(ADJECTIVE_ORDER, targets, strict=True)))


def _f3(policy: AdaptationPolicy) -> Iterator[Transform]:
    for rule, slot, current in rule_slots(policy):
        for adjective in ADJECTIVE_ORDER:
            if adjective is not current:
                yield ReplaceSlot(rule=rule, slot=slot, adjective=adjective)


def _f4(policy: AdaptationPolicy) -> Iterator[Transform]:
    for (rule_a, slot_a, adj_a), (rule_b, slot_b, adj_b) in itertools.combinations(
        rule_slots(policy), 2
    ):
        if adj_a is not adj_b:
            yield SwapSlots(rule_a=rule_a, slot_a=slot_a, rule_b=rule_b, slot_b=slot_b)


def describe(transform: Transform, policy: AdaptationPolicy | None = None) -> str:
    match transform:
        case SwapProperties(prop_a=a, prop_b=b):
            return f"swap sensed values of {a} and {b}"
        case ScaleProperty(prop=prop, factor=factor):
            return f"scale sensed {prop} by {factor:g}"
        case AdjectiveMap(prop=prop, mapping=mapping):
            changed = ", ".join(f"{k}->{v}" for k, v in mapping.items() if k is not v)
            return f"{prop} adjectives {changed}"
        case ReplaceSlot(rule=rule, slot=slot, adjective=adjective):
            before = _slot_adjective(policy, rule, slot) if policy else "?"
            return f"rule {rule + 1} {slot}: {before} -> {adjective}"
        case SwapSlots(rule_a=ra, slot_a=sa, rule_b=rb, slot_b=sb):
            return f"swap rule {ra + 1} {sa} with rule {rb + 1} {sb}"
        case Identity():
            return "unchanged policy"
    raise PlanError(f"unknown transform {transform!r}")


def _select(
    candidates: Sequence[Transform], requested: int | str, group: FaultGroup
) -> list[Transform]:
    if requested == "all":
        return list(candidates)
    if not isinstance(requested, int) or requested < 0:
        raise PlanError(f"{group}: mutant count must be a non-negative integer or 'all'")
    if requested > len(candidates):
        raise PlanError(
            f"{group}: plan requests {requested} mutants but at most {len(candidates)} "
            "can be enumerated"
        )
    total = len(candidates)
    return [candidates[i * total // requested] for i in range(requested)]


def enumerate_transforms(
    policy: AdaptationPolicy, schema: ContextSchema
) -> dict[FaultGroup, list[Transform]]:
    return {
        FaultGroup.F1: list(_f1(schema)),
        FaultGroup.F2: list(_f2(schema)),
        FaultGroup.F3: list(_f3(policy)),
        FaultGroup.F4: list(_f4(policy)),
    }


def generate_mutants(
    policy: AdaptationPolicy,
    schema: ContextSchema,
    plan: MutationPlan | str = "default",
) -> list[MutantSpec]:
    """Deterministic mutant list; ``exhaustive-small`` takes every candidate."""
    if isinstance(plan, str):
        if plan == "exhaustive-small":
            plan = MutationPlan.exhaustive()
        elif plan == "default":
            plan = MutationPlan()
        else:
            raise PlanError(f"unknown mutation plan '{plan}'")
    families = enumerate_transforms(policy, schema)
    mutants: list[MutantSpec] = []
    if plan.control:
        mutants.append(
            MutantSpec(
                id=CONTROL_ID, group=None, description=describe(Identity()), transform=Identity()
            )
        )
    for group in FaultGroup:
        requested = plan.counts.get(group, 0)
        for index, transform in enumerate(_select(families[group], requested, group), start=1):
            mutants.append(
                MutantSpec(
                    id=f"{group}-{index:03d}",
                    group=group,
                    description=describe(transform, policy),
                    transform=transform,
                )
            )
    log.info(
        "mutants_generated",
        total=len(mutants),
        available={str(group): len(items) for group, items in families.items()},
    )
    return mutants


def _index(schema: ContextSchema, name: str) -> int:
    if name not in schema.names:
        raise PlanError(f"mutant references unknown property '{name}'")
    return schema.names.index(name)


def apply_mutant(
    policy: AdaptationPolicy, schema: ContextSchema, mutant: MutantSpec
) -> tuple[AdaptationPolicy, Instrumentation]:
    """The mutated policy plus the hooks the simulator needs to realise the mutant."""
    transform = mutant.transform
    match transform:
        case SwapProperties(prop_a=a, prop_b=b):
            hook = _SwapValues(_index(schema, a), _index(schema, b))
            return policy, Instrumentation(rewrite_instance=hook)
        case ScaleProperty(prop=prop, factor=factor):
            hook = _ScaleValue(_index(schema, prop), factor)
            return policy, Instrumentation(rewrite_instance=hook)
        case AdjectiveMap(prop=prop, mapping=mapping):
            _index(schema, prop)
            return policy, Instrumentation(rewrite_adjectives=_MapAdjectives(prop, dict(mapping)))
        case ReplaceSlot(rule=rule, slot=slot, adjective=adjective):
            _slot_adjective(policy, rule, slot)
            rules = list(policy.rules)
            rules[rule] = _with_slot(rules[rule], slot, adjective)
            return structs.replace(policy, rules=tuple(rules)), Instrumentation()
        case SwapSlots(rule_a=ra, slot_a=sa, rule_b=rb, slot_b=sb):
            adj_a = _slot_adjective(policy, ra, sa)
            adj_b = _slot_adjective(policy, rb, sb)
            rules = list(policy.rules)
            rules[ra] = _with_slot(rules[ra], sa, adj_b)
            rules[rb] = _with_slot(rules[rb], sb, adj_a)
            return structs.replace(policy, rules=tuple(rules)), Instrumentation()
        case Identity():
            return policy, Instrumentation()
    raise PlanError(f"unknown transform {transform!r}")


@attrs.frozen
class _Experiment:
    schema: ContextSchema
    policy: AdaptationPolicy
    fuzzy_sets: FuzzySets
    initial: Variant
    columns: tuple[AeqColumn, ...]
    flows: tuple[ContextFlow, ...]
    originals: tuple[VariantFlow, ...]

    def row(self, mutant: MutantSpec) -> MutantRow:
        fuzzifier = Fuzzifier(self.schema, self.fuzzy_sets)
        try:
            mutated, hooks = apply_mutant(self.policy, self.schema, mutant)
        except Exception as exc:  # noqa: BLE001 - recorded in every cell of the row
            return MutantRow(
                mutant=mutant,
                cells=tuple(
                    KillCell(mutant.id, column.id, CellOutcome.ERROR, error=str(exc))
                    for column in self.columns
                ),
            )
        cells: list[KillCell] = []
        for column, flow, original in zip(self.columns, self.flows, self.originals, strict=True):
            try:
                trace = run(mutated, fuzzifier, self.initial, flow, hooks)
                comparison = trace_equal(original, trace)
            except Exception as exc:  # noqa: BLE001 - a failing cell never aborts the matrix
                cells.append(KillCell(mutant.id, column.id, CellOutcome.ERROR, error=str(exc)))
                continue
            if comparison.equal:
                cells.append(KillCell(mutant.id, column.id, CellOutcome.SURVIVED))
            else:
                cells.append(
                    KillCell(
                        mutant.id,
                        column.id,
                        CellOutcome.KILLED,
                        divergence_step=comparison.divergence,
                    )
                )
        return MutantRow(mutant=mutant, cells=tuple(cells))


_WORKER: _Experiment | None = None


def _init_worker(schema_json: bytes, state: tuple[object, ...]) -> None:
    global _WORKER
    schema = ContextSchema.model_validate_json(schema_json)
    _WORKER = _Experiment(schema, *state)  # type: ignore[arg-type]


def _worker_row(mutant: MutantSpec) -> MutantRow:
    assert _WORKER is not None
    return _WORKER.row(mutant)


def suite_columns(
    aeq_suites: Mapping[str, Sequence[ContextFlow]],
) -> tuple[tuple[AeqColumn, ...], tuple[ContextFlow, ...]]:
    columns: list[AeqColumn] = []
    flows: list[ContextFlow] = []
    for suite, suite_flows in aeq_suites.items():
        for flow in suite_flows:
            columns.append(AeqColumn(id=f"{suite}/{flow.id}", suite=suite, flow_id=flow.id))
            flows.append(flow)
    return tuple(columns), tuple(flows)


def run_experiment(
    schema: ContextSchema,
    policy: AdaptationPolicy,
    fuzzy_sets: FuzzySets | None,
    mutants: Sequence[MutantSpec],
    aeq_suites: Mapping[str, Sequence[ContextFlow]],
    initial: Variant,
    jobs: int = 1,
) -> KillMatrix:
    """Run every mutant against every AEQ; rows come back in mutant order."""
    sets = fuzzy_sets or FuzzySets()
    columns, flows = suite_columns(aeq_suites)
    fuzzifier = Fuzzifier(schema, sets)
    originals = tuple(run(policy, fuzzifier, initial, flow) for flow in flows)
    experiment = _Experiment(schema, policy, sets, initial, columns, flows, originals)
    log.info("experiment_started", mutants=len(mutants), aeqs=len(columns), jobs=jobs)

    if jobs > 1 and len(mutants) > 1:
        state = (policy, sets, initial, columns, flows, originals)
        with ProcessPoolExecutor(
            max_workers=jobs,
            initializer=_init_worker,
            initargs=(schema.model_dump_json().encode(), state),
        ) as pool:
            rows = list(pool.map(_worker_row, mutants))
    else:
        rows = []
        for mutant in mutants:
            rows.append(experiment.row(mutant))
            log.debug("mutant_row_finished", mutant_id=mutant.id, kills=rows[-1].kills)

    matrix = KillMatrix(columns=columns, rows=tuple(rows))
    log.info("experiment_finished", mutants=len(rows), aeqs=len(columns))
    return matrix


def build_report(
    matrix: KillMatrix, majority_threshold: float = MAJORITY_THRESHOLD
) -> MutationReport:
    """Summary statistics; a pure projection of the matrix cells."""
    rows = [row for row in matrix.rows if not row.mutant.is_control]
    total = len(rows)
    aeqs = len(matrix.columns)
    killed = [row for row in rows if row.kills > 0]
    by_all = [row for row in rows if aeqs and row.kills == aeqs]
    by_majority = [row for row in rows if row.kill_fraction > majority_threshold]

    groups: list[GroupStats] = []
    for group in FaultGroup:
        members = [row for row in rows if row.mutant.group is group]
        if not members:
            continue
        group_killed = sum(1 for row in members if row.kills > 0)
        groups.append(
            GroupStats(
                group=group,
                mutants=len(members),
                killed=group_killed,
                kill_score=group_killed / len(members),
                mean_kill_fraction=sum(row.kill_fraction for row in members) / len(members),
            )
        )

    errored = [
        row
        for row in rows
        if row.cells and all(cell.outcome is CellOutcome.ERROR for cell in row.cells)
    ]
    failed = {row.mutant.id for row in errored}
    equivalent = [row for row in matrix.rows if row.kills == 0 and row.mutant.id not in failed]
    suites, suite_kills = _suite_kills(matrix.columns, rows)
    return MutationReport(
        mutants=total,
        aeqs=aeqs,
        simulations=(len(matrix.rows) + 1) * aeqs,
        killed=len(killed),
        raw_kill_score=len(killed) / total if total else 0.0,
        killed_by_all=len(by_all),
        killed_by_all_fraction=len(by_all) / total if total else 0.0,
        killed_by_majority=len(by_majority),
        killed_by_majority_fraction=len(by_majority) / total if total else 0.0,
        majority_threshold=majority_threshold,
        groups=tuple(groups),
        possibly_equivalent=tuple(row.mutant.id for row in equivalent),
        survivors=tuple(
            SurvivorDiagnosis(
                mutant_id=row.mutant.id,
                group=row.mutant.group,
                description=row.mutant.description,
                kill_fraction=row.kill_fraction,
            )
            for row in equivalent
            if not row.mutant.is_control
        ),
        errors=sum(
            1 for row in matrix.rows for cell in row.cells if cell.outcome is CellOutcome.ERROR
        ),
        suites=suites,
        suite_kills=suite_kills,
        errored=tuple(row.mutant.id for row in errored),
    )


def _suite_kills(
    columns: Sequence[AeqColumn], rows: Sequence[MutantRow]
) -> tuple[tuple[str, ...], tuple[SuiteKills, ...]]:
    """Kills per suite in column order; the mean weighs every suite equally."""
    suites = tuple(dict.fromkeys(column.suite for column in columns))
    suite_of = {column.id: column.suite for column in columns}
    stats: list[SuiteKills] = []
    for row in rows:
        per_suite = dict.fromkeys(suites, 0)
        for cell in row.cells:
            suite = suite_of.get(cell.aeq_id)
            if cell.killed and suite is not None:
                per_suite[suite] += 1
        kills = tuple(per_suite.values())
        mean = sum(kills) / len(kills) if kills else 0.0
        stats.append(SuiteKills(mutant_id=row.mutant.id, kills=kills, mean_kills=mean))
    return suites, tuple(stats)


def decode_mutants(data: bytes) -> list[MutantSpec]:
    return msgspec.json.decode(data, type=list[MutantSpec])
