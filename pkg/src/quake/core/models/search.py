from __future__ import annotations

import math
from typing import Self

import attrs
import msgspec
from pydantic import BaseModel, ConfigDict, Field, model_validator

from quake.core.models.context import ContextFlow, ContextInstance, EpConfig
from quake.core.models.coverage import CoverageUniverse
from quake.core.models.enums import SearchAction, ShapeClass

WEIGHT_TOLERANCE = 1e-9


def _check_sum(*weights: float) -> None:
    if any(w < 0 for w in weights):
        raise ValueError("weights must be non-negative")
    if not math.isclose(sum(weights), 1.0, abs_tol=WEIGHT_TOLERANCE):
        raise ValueError(f"weights must sum to 1, got {sum(weights)}")


class LocalObjectiveWeights(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    w_cov: float = 0.4
    w_ep: float = 0.6
    w_re: float = 0.0

    @model_validator(mode="after")
    def _normalized(self) -> Self:
        _check_sum(self.w_cov, self.w_ep, self.w_re)
        return self


class GlobalObjectiveWeights(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    w_cov: float = 0.5
    w_shape: float = 0.5

    @model_validator(mode="after")
    def _normalized(self) -> Self:
        _check_sum(self.w_cov, self.w_shape)
        return self


class SearchWeights(BaseModel):
    """The ``search.weights`` config section, flat as it appears in the file."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    w_cov_local: float = 0.4
    w_ep: float = 0.6
    w_re: float = 0.0
    w_cov_global: float = 0.5
    w_shape: float = 0.5

    @model_validator(mode="after")
    def _normalized(self) -> Self:
        _check_sum(self.w_cov_local, self.w_ep, self.w_re)
        _check_sum(self.w_cov_global, self.w_shape)
        return self

    @property
    def local(self) -> LocalObjectiveWeights:
        return LocalObjectiveWeights(w_cov=self.w_cov_local, w_ep=self.w_ep, w_re=self.w_re)

    @property
    def global_(self) -> GlobalObjectiveWeights:
        return GlobalObjectiveWeights(w_cov=self.w_cov_global, w_shape=self.w_shape)


class SearchConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    flow_length: int = Field(default=60, ge=3)
    tabu_tenure: int | None = Field(default=None, ge=1)
    mem_max_age: int = Field(default=10, ge=1)
    stale_limit: int = Field(default=100, ge=1)
    hard_limit: int = Field(default=1000, ge=1)
    local_iterations: int = Field(default=500, ge=0)
    neighborhood: int = Field(default=20, ge=1)
    lambda_size: float = Field(default=0.01, ge=0)
    seed: int = Field(default=42, ge=0, lt=2**64)
    weights: SearchWeights = Field(default_factory=SearchWeights)
    aspiration: bool = True
    max_memory_overlap: int = Field(default=3, ge=0)
    sample_bias: float = Field(default=0.5, ge=0, le=1)
    rounds: int = Field(default=1, ge=1)
    ep: EpConfig = Field(default_factory=EpConfig)

    @model_validator(mode="after")
    def _check_limits(self) -> Self:
        if self.stale_limit > self.hard_limit:
            raise ValueError("stale_limit must not exceed hard_limit")
        return self

    @property
    def tenure(self) -> int:
        return self.tabu_tenure if self.tabu_tenure is not None else max(1, self.flow_length // 2)


class RealityDistribution(BaseModel):
    """Reference probability mass per property, one entry per grid point."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    masses: dict[str, list[float]] = Field(min_length=1)

    @model_validator(mode="after")
    def _check_masses(self) -> Self:
        for name, mass in self.masses.items():
            if any(m < 0 for m in mass):
                raise ValueError(f"reality mass for '{name}' has negative entries")
            if not math.isclose(sum(mass), 1.0, abs_tol=1e-6):
                raise ValueError(f"reality mass for '{name}' sums to {sum(mass)}, expected 1")
        return self


@attrs.frozen(slots=True)
class SearchMemory:
    """Elements already handled by the suite: covered pairs and used instances."""

    universe: CoverageUniverse
    instances: frozenset[ContextInstance] = frozenset()


class FlowSummary(msgspec.Struct, frozen=True):
    flow_id: str
    l_value: float
    ep_count: float
    shape: ShapeClass
    pairs_covered: int


class TraceEvent(msgspec.Struct, frozen=True):
    iter: int
    action: SearchAction
    g_before: float
    g_after: float
    flow_id: str
    age: int = 0
    round: int = 0


class SearchResult(msgspec.Struct, frozen=True):
    """A finished suite.

    With several rounds ``iterations_used`` totals every round and ``round_iterations``
    holds each round's own count; trace G values only rise within one ``round``.
    """

    solution: tuple[ContextFlow, ...]
    g_value: float
    per_flow: tuple[FlowSummary, ...]
    iterations_used: int
    universe_size: int
    pairs_covered: int
    trace: tuple[TraceEvent, ...] | None = None
    round_iterations: tuple[int, ...] = ()

    @property
    def coverage_ratio(self) -> float:
        return self.pairs_covered / self.universe_size if self.universe_size else 1.0
