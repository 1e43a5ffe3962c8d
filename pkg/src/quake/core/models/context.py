from __future__ import annotations

import math
from collections.abc import Sequence
from typing import Self, TypeAlias

import attrs
import msgspec
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

from quake.core.models.constraint import Constraint, compile_constraint
from quake.core.models.enums import OriginMode, PropertyKind, ViolationKind

GRID_TOLERANCE = 1e-9

ContextInstance: TypeAlias = tuple[float, ...]


def _canonical(value: float) -> float:
    return round(value, 12) + 0.0


class PropertySpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str = Field(pattern=r"^[A-Za-z_][A-Za-z0-9_]*$")
    kind: PropertyKind
    lower: float
    upper: float
    step: float = Field(default=1.0, gt=0)

    @model_validator(mode="after")
    def _check_domain(self) -> Self:
        if self.lower > self.upper:
            raise ValueError(f"{self.name}: lower bound exceeds upper bound")
        ratio = (self.upper - self.lower) / self.step
        if abs(ratio - round(ratio)) > GRID_TOLERANCE:
            raise ValueError(f"{self.name}: domain span is not a multiple of step {self.step}")
        if self.kind is PropertyKind.INTEGER and not all(
            float(v).is_integer() for v in (self.lower, self.upper, self.step)
        ):
            raise ValueError(f"{self.name}: integer properties need integral bounds and step")
        return self

    @property
    def span(self) -> float:
        return self.upper - self.lower

    @property
    def cardinality(self) -> int:
        return math.floor(self.span / self.step + GRID_TOLERANCE) + 1

    def grid_index(self, value: float) -> float:
        return (value - self.lower) / self.step

    def value_at(self, index: int) -> float:
        return _canonical(self.lower + index * self.step)

    def grid(self) -> np.ndarray:
        return np.array([self.value_at(i) for i in range(self.cardinality)], dtype=float)

    def in_bounds(self, value: float) -> bool:
        return self.lower - GRID_TOLERANCE <= value <= self.upper + GRID_TOLERANCE

    def is_aligned(self, value: float) -> bool:
        index = self.grid_index(value)
        return abs(index - round(index)) <= GRID_TOLERANCE

    def snap(self, value: float) -> float:
        """Canonical grid value for an aligned, in-bounds value."""
        return self.value_at(round(self.grid_index(value)))

    def normalize(self, value: float) -> float:
        if self.span == 0:
            return 0.0
        return (value - self.lower) / self.span

    def format(self, value: float) -> str:
        if self.kind is PropertyKind.INTEGER:
            return str(int(round(value)))
        return repr(_canonical(value))


class OriginSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    mode: OriginMode = OriginMode.LOWER_CORNER
    explicit_values: list[float] | None = None

    @model_validator(mode="after")
    def _check_explicit(self) -> Self:
        if self.mode is OriginMode.EXPLICIT and not self.explicit_values:
            raise ValueError("explicit origin requires explicit_values")
        return self


class ShapeThresholds(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    peak_prominence: float = 0.5
    peak_start: float = Field(default=0.25, ge=0, le=1)
    peak_end: float = Field(default=1.0, ge=0, le=1)
    min_slope: float = Field(default=0.01, ge=0)


class EpConfig(BaseModel):
    """Thresholds that quantify a 'violent' variation between transitions."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    rho: float = Field(default=4.0, gt=1)
    epsilon: float = Field(default=0.25, gt=0)
    window_max: int = Field(default=8, ge=2)
    shape: ShapeThresholds = Field(default_factory=ShapeThresholds)


@attrs.frozen(slots=True)
class Violation:
    kind: ViolationKind
    subject: str
    message: str


@attrs.frozen(slots=True)
class ValidityResult:
    violations: tuple[Violation, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations


class ContextSchema(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    properties: list[PropertySpec] = Field(min_length=1)
    constraints: list[str] = Field(default_factory=list)
    origin: OriginSpec = Field(default_factory=OriginSpec)
    ep: EpConfig | None = None
    coverage_samples: dict[str, list[float]] | None = None

    _compiled: tuple[Constraint, ...] = PrivateAttr(default=())
    _names: tuple[str, ...] = PrivateAttr(default=())
    _lowers: tuple[float, ...] = PrivateAttr(default=())
    _spans: tuple[float, ...] = PrivateAttr(default=())

    @model_validator(mode="after")
    def _check_schema(self) -> Self:
        names = [spec.name for spec in self.properties]
        duplicates = sorted({name for name in names if names.count(name) > 1})
        if duplicates:
            raise ValueError(f"duplicate property names: {', '.join(duplicates)}")
        compiled = [compile_constraint(expression, names) for expression in self.constraints]
        if self.origin.mode is OriginMode.EXPLICIT:
            origin = self.origin.explicit_values or []
            if len(origin) != len(names):
                raise ValueError("explicit origin arity does not match the properties")
            env = dict(zip(names, origin, strict=True))
            off_grid = [
                spec.name
                for spec, value in zip(self.properties, origin, strict=True)
                if not spec.in_bounds(value) or not spec.is_aligned(value)
            ]
            failed = [c.expression for c in compiled if not c.holds(env)]
            if off_grid or failed:
                raise ValueError(f"explicit origin is not a valid instance: {off_grid + failed}")
        for name, samples in (self.coverage_samples or {}).items():
            if name not in names:
                raise ValueError(f"coverage_samples references unknown property '{name}'")
            spec = self.properties[names.index(name)]
            for value in samples:
                if not spec.in_bounds(value) or not spec.is_aligned(value):
                    raise ValueError(f"coverage sample {value} is not on the grid of '{name}'")
        return self

    def model_post_init(self, __context: object) -> None:
        names = tuple(spec.name for spec in self.properties)
        self._names = names
        self._compiled = tuple(compile_constraint(expr, names) for expr in self.constraints)
        self._lowers = tuple(spec.lower for spec in self.properties)
        self._spans = tuple(spec.span or 1.0 for spec in self.properties)

    @property
    def names(self) -> tuple[str, ...]:
        return self._names

    @property
    def arity(self) -> int:
        return len(self.properties)

    @property
    def compiled_constraints(self) -> tuple[Constraint, ...]:
        return self._compiled

    def coordinates(self, values: Sequence[float] | np.ndarray) -> np.ndarray:
        """Min-max normalised coordinates; works row-wise on a 2-D array of instances."""
        return (np.asarray(values, dtype=float) - self._lowers) / self._spans

    def spec(self, name: str) -> PropertySpec:
        return self.properties[self._names.index(name)]

    def env(self, values: Sequence[float]) -> dict[str, float]:
        return dict(zip(self._names, values, strict=True))

    def failed_constraints(self, values: Sequence[float]) -> list[Constraint]:
        env = self.env(values)
        return [constraint for constraint in self._compiled if not constraint.holds(env)]

    def satisfies_constraints(self, values: Sequence[float]) -> bool:
        env = self.env(values)
        return all(constraint.holds(env) for constraint in self._compiled)

    def check(self, values: Sequence[float]) -> list[Violation]:
        """Every bound, grid, and constraint violation of a full-arity instance."""
        violations: list[Violation] = []
        for spec, value in zip(self.properties, values, strict=True):
            if not spec.in_bounds(value):
                violations.append(
                    Violation(
                        ViolationKind.BOUND,
                        spec.name,
                        f"{spec.name}={value} outside [{spec.lower}, {spec.upper}]",
                    )
                )
            elif not spec.is_aligned(value):
                violations.append(
                    Violation(
                        ViolationKind.GRID,
                        spec.name,
                        f"{spec.name}={value} is not aligned to step {spec.step}",
                    )
                )
        if violations:
            return violations
        violations.extend(
            Violation(ViolationKind.CONSTRAINT, constraint.expression, constraint.expression)
            for constraint in self.failed_constraints(values)
        )
        return violations

    def canonical(self, values: Sequence[float]) -> ContextInstance:
        return tuple(spec.snap(value) for spec, value in zip(self.properties, values, strict=True))

    def sample_values(self, name: str) -> list[float] | None:
        if not self.coverage_samples or name not in self.coverage_samples:
            return None
        spec = self.spec(name)
        return [spec.snap(value) for value in self.coverage_samples[name]]


class ContextFlow(msgspec.Struct, frozen=True):
    """A time-ordered sequence of valid context instances."""

    id: str
    instances: tuple[ContextInstance, ...]

    def __post_init__(self) -> None:
        if not self.instances:
            raise ValueError(f"flow {self.id} is empty")

    def __len__(self) -> int:
        return len(self.instances)

    def reversed(self, flow_id: str | None = None) -> ContextFlow:
        return ContextFlow(id=flow_id or self.id, instances=tuple(reversed(self.instances)))
