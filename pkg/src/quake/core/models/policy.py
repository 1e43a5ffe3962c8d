from __future__ import annotations

from typing import Self

import msgspec
import numpy as np
import skfuzzy as fuzz
from pydantic import BaseModel, ConfigDict, Field, model_validator

from quake.core.models.context import ContextInstance
from quake.core.models.enums import ADJECTIVE_ORDER, Action, Adjective, Guard

CACHE_SIZE_MIN = 10
CACHE_SIZE_MAX = 1024
SERVERS_MIN = 1
SERVERS_MAX = 100

DEFAULT_UTILITY_VALUES: dict[Adjective, float] = {
    Adjective.LOW: 0.25,
    Adjective.MEDIUM: 0.5,
    Adjective.HIGH: 0.75,
}


class Variant(msgspec.Struct, frozen=True):
    """One configuration of the adaptive web server."""

    cache_exists: bool = False
    cache_size: int = 0
    cache_validity_s: int = 0
    data_servers: int = SERVERS_MIN

    def __post_init__(self) -> None:
        if self.cache_exists:
            if not CACHE_SIZE_MIN <= self.cache_size <= CACHE_SIZE_MAX:
                raise ValueError(
                    f"cache_size {self.cache_size} outside [{CACHE_SIZE_MIN}, {CACHE_SIZE_MAX}]"
                )
            if self.cache_validity_s < 1:
                raise ValueError("an existing cache needs cache_validity_s >= 1")
        elif self.cache_size != 0 or self.cache_validity_s != 0:
            raise ValueError("without a cache, cache_size and cache_validity_s must be 0")
        if not SERVERS_MIN <= self.data_servers <= SERVERS_MAX:
            raise ValueError(
                f"data_servers {self.data_servers} outside [{SERVERS_MIN}, {SERVERS_MAX}]"
            )

    @classmethod
    def parse(cls, text: str) -> Variant:
        """Parse ``cache_exists,cache_size,cache_validity_s,data_servers``."""
        parts = [part.strip() for part in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"variant needs 4 comma-separated fields, got {len(parts)}")
        flag = parts[0].lower()
        if flag not in {"true", "false", "1", "0"}:
            raise ValueError(f"cache_exists must be true or false, got {parts[0]!r}")
        return cls(
            cache_exists=flag in {"true", "1"},
            cache_size=int(parts[1]),
            cache_validity_s=int(parts[2]),
            data_servers=int(parts[3]),
        )


class Rule(msgspec.Struct, frozen=True):
    when_property: str
    when_adjectives: tuple[Adjective, ...]
    action: Action
    utility_adjective: Adjective
    guard: Guard | None = None
    line: int = 0

    def __post_init__(self) -> None:
        if not self.when_adjectives:
            raise ValueError("a rule needs at least one WHEN adjective")


class AdaptationPolicy(msgspec.Struct, frozen=True):
    rules: tuple[Rule, ...] = ()
    utility_threshold: float = 0.5
    utility_values: dict[Adjective, float] = msgspec.field(
        default_factory=lambda: dict(DEFAULT_UTILITY_VALUES)
    )
    default_cache_size: int = 128
    default_cache_validity_s: int = 5

    def __post_init__(self) -> None:
        if not 0 < self.utility_threshold < 1:
            raise ValueError(f"utility threshold {self.utility_threshold} must lie in (0, 1)")
        if not CACHE_SIZE_MIN <= self.default_cache_size <= CACHE_SIZE_MAX:
            raise ValueError(f"default cache size {self.default_cache_size} is out of range")
        if self.default_cache_validity_s < 1:
            raise ValueError("default cache validity must be at least 1 second")


Triangle = tuple[float, float, float]


class FuzzyPartition(BaseModel):
    """Triangular low/medium/high sets over a normalised [0, 1] range."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    low: Triangle = (0.0, 0.0, 0.5)
    medium: Triangle = (0.25, 0.5, 0.75)
    high: Triangle = (0.5, 1.0, 1.0)

    @model_validator(mode="after")
    def _check_sets(self) -> Self:
        for adjective in ADJECTIVE_ORDER:
            left, peak, right = self.triangle(adjective)
            if not 0 <= left <= peak <= right <= 1:
                raise ValueError(f"{adjective} breakpoints must satisfy 0 <= l <= p <= r <= 1")
        if not self.low[1] < self.medium[1] < self.high[1]:
            raise ValueError("peaks must be ordered low < medium < high")
        grid = self.universe()
        degrees = [fuzz.trimf(grid, list(self.triangle(a))) for a in ADJECTIVE_ORDER]
        if not np.all(np.maximum.reduce(degrees) > 0):
            raise ValueError("fuzzy sets leave part of [0, 1] without membership")
        return self

    def triangle(self, adjective: Adjective) -> Triangle:
        return {Adjective.LOW: self.low, Adjective.MEDIUM: self.medium, Adjective.HIGH: self.high}[
            adjective
        ]

    def universe(self) -> np.ndarray:
        """Sample points of [0, 1] that include every breakpoint."""
        breakpoints = [point for a in ADJECTIVE_ORDER for point in self.triangle(a)]
        return np.union1d(np.linspace(0.0, 1.0, 1001), breakpoints)


class FuzzySets(BaseModel):
    """Per-property partitions, falling back to ``default``."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    default: FuzzyPartition = Field(default_factory=FuzzyPartition)
    properties: dict[str, FuzzyPartition] = Field(default_factory=dict)

    def partition(self, name: str) -> FuzzyPartition:
        return self.properties.get(name, self.default)


class VariantStep(msgspec.Struct, frozen=True):
    step: int
    instance: ContextInstance
    variant: Variant
    actions: tuple[Action, ...] = ()


class VariantFlow(msgspec.Struct, frozen=True):
    flow_id: str
    steps: tuple[VariantStep, ...]

    def __len__(self) -> int:
        return len(self.steps)
