from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Sequence
from enum import StrEnum

import structlog

from quake.core.models.context import (
    ContextFlow,
    ContextInstance,
    ContextSchema,
    ValidityResult,
)
from quake.errors import (
    CapacityError,
    ConstraintViolationError,
    StructureError,
    UnsatisfiableSchemaError,
)

log: structlog.stdlib.BoundLogger = structlog.get_logger(__name__)

DEFAULT_ENUMERATION_CAP = 10**7


class SpaceMode(StrEnum):
    UNCONSTRAINED = "unconstrained"
    EXACT = "exact"


def _check_arity(schema: ContextSchema, values: Sequence[float]) -> None:
    if len(values) != schema.arity:
        raise StructureError(
            f"Instance has {len(values)} values but the schema declares {schema.arity} properties."
        )


def validate_instance(schema: ContextSchema, inst: Sequence[float]) -> ValidityResult:
    _check_arity(schema, inst)
    return ValidityResult(violations=tuple(schema.check(inst)))


def make_instance(schema: ContextSchema, values: Sequence[float]) -> ContextInstance:
    """Validate raw values and return them as a canonical grid instance."""
    result = validate_instance(schema, values)
    if not result.valid:
        details = "; ".join(violation.message for violation in result.violations)
        raise ConstraintViolationError(f"Invalid context instance {tuple(values)}: {details}")
    return schema.canonical(values)


def make_flow(
    schema: ContextSchema, flow_id: str, instances: Iterable[Sequence[float]]
) -> ContextFlow:
    """Build a flow, admitting only valid instances."""
    canonical: list[ContextInstance] = []
    for seq, values in enumerate(instances):
        try:
            canonical.append(make_instance(schema, values))
        except ConstraintViolationError as exc:
            raise ConstraintViolationError(f"flow {flow_id}, seq {seq}: {exc}") from exc
    if not canonical:
        raise ConstraintViolationError(f"flow {flow_id} has no instances")
    return ContextFlow(id=flow_id, instances=tuple(canonical))


def unconstrained_size(schema: ContextSchema) -> int:
    return math.prod(spec.cardinality for spec in schema.properties)


def iter_grid(schema: ContextSchema) -> Iterable[ContextInstance]:
    grids = [tuple(float(v) for v in spec.grid()) for spec in schema.properties]
    return itertools.product(*grids)


def context_space_size(
    schema: ContextSchema,
    mode: SpaceMode = SpaceMode.UNCONSTRAINED,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> int:
    total = unconstrained_size(schema)
    if mode is SpaceMode.UNCONSTRAINED:
        return total
    if total > cap:
        raise CapacityError(
            f"Exact context space enumeration needs {total} grid points", cap=cap
        )
    if not schema.compiled_constraints:
        return total
    return sum(1 for values in iter_grid(schema) if schema.satisfies_constraints(values))


def flow_space_size(schema: ContextSchema, flow_length: int) -> int:
    """Number of ordered flows of the given length; Python integers never wrap."""
    if flow_length < 1:
        raise ValueError("flow_length must be at least 1")
    return context_space_size(schema, SpaceMode.UNCONSTRAINED) ** flow_length


def space_magnitude(count: int) -> tuple[float, int]:
    """(mantissa, exponent) with count ~= mantissa * 10**exponent, for counts of any size."""
    if count <= 0:
        return (0.0, 0)
    exponent = math.floor((count.bit_length() - 1) * math.log10(2))
    if count >= 10 ** (exponent + 1):
        exponent += 1
    elif count < 10**exponent:
        exponent -= 1
    shift = max(exponent - 16, 0)
    mantissa = (count // 10**shift) / 10 ** (exponent - shift)
    if mantissa >= 10.0:
        return (mantissa / 10, exponent + 1)
    return (mantissa, exponent)


def find_valid_instance(
    schema: ContextSchema,
    candidates: Iterable[Sequence[float]],
) -> ContextInstance:
    """First candidate satisfying every constraint, or an error naming the ones never met."""
    ever_held: set[str] = set()
    for values in candidates:
        failed = {constraint.expression for constraint in schema.failed_constraints(values)}
        if not failed:
            return schema.canonical(values)
        ever_held.update(
            c.expression for c in schema.compiled_constraints if c.expression not in failed
        )
    never_held = [
        c.expression for c in schema.compiled_constraints if c.expression not in ever_held
    ]
    log.warning("schema_unsatisfiable", constraints=never_held)
    raise UnsatisfiableSchemaError(never_held)
