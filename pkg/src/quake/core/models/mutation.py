from __future__ import annotations

from typing import Literal

import msgspec
from pydantic import BaseModel, ConfigDict, Field

from quake.core.models.enums import Adjective, CellOutcome, FaultGroup

THEN_SLOT = "then"


def when_slot(index: int) -> str:
    return f"when:{index}"


class SwapProperties(msgspec.Struct, frozen=True, tag="swap"):
    """Exchange the sensed values of two properties before fuzzification."""

    prop_a: str
    prop_b: str


class ScaleProperty(msgspec.Struct, frozen=True, tag="scale"):
    prop: str
    factor: float


class AdjectiveMap(msgspec.Struct, frozen=True, tag="adjective_map"):
    """Substitute adjectives of one property after fuzzification."""

    prop: str
    mapping: dict[Adjective, Adjective]


class ReplaceSlot(msgspec.Struct, frozen=True, tag="replace_slot"):
    rule: int
    slot: str
    adjective: Adjective


class SwapSlots(msgspec.Struct, frozen=True, tag="swap_slots"):
    rule_a: int
    slot_a: str
    rule_b: int
    slot_b: str


class Identity(msgspec.Struct, frozen=True, tag="identity"):
    pass


Transform = SwapProperties | ScaleProperty | AdjectiveMap | ReplaceSlot | SwapSlots | Identity


class MutantSpec(msgspec.Struct, frozen=True):
    id: str
    group: FaultGroup | None
    description: str
    transform: Transform

    @property
    def is_control(self) -> bool:
        return isinstance(self.transform, Identity)


class KillCell(msgspec.Struct, frozen=True):
    mutant_id: str
    aeq_id: str
    outcome: CellOutcome
    divergence_step: int | None = None
    error: str | None = None

    @property
    def killed(self) -> bool:
        return self.outcome is CellOutcome.KILLED


class MutantRow(msgspec.Struct, frozen=True):
    mutant: MutantSpec
    cells: tuple[KillCell, ...]

    @property
    def kills(self) -> int:
        return sum(1 for cell in self.cells if cell.killed)

    @property
    def kill_fraction(self) -> float:
        return self.kills / len(self.cells) if self.cells else 0.0


class AeqColumn(msgspec.Struct, frozen=True):
    id: str
    suite: str
    flow_id: str


class KillMatrix(msgspec.Struct, frozen=True):
    columns: tuple[AeqColumn, ...]
    rows: tuple[MutantRow, ...]

    @property
    def aeq_ids(self) -> tuple[str, ...]:
        return tuple(column.id for column in self.columns)

    @property
    def mutant_ids(self) -> tuple[str, ...]:
        return tuple(row.mutant.id for row in self.rows)


class GroupStats(msgspec.Struct, frozen=True):
    group: FaultGroup
    mutants: int
    killed: int
    kill_score: float
    mean_kill_fraction: float


class SurvivorDiagnosis(msgspec.Struct, frozen=True):
    mutant_id: str
    group: FaultGroup | None
    description: str
    kill_fraction: float


class SuiteKills(msgspec.Struct, frozen=True):
    """How many AEQs of each suite kill one mutant, and the mean over suites."""

    mutant_id: str
    kills: tuple[int, ...]
    mean_kills: float


class MutationReport(msgspec.Struct, frozen=True):
    mutants: int
    aeqs: int
    simulations: int
    killed: int
    raw_kill_score: float
    killed_by_all: int
    killed_by_all_fraction: float
    killed_by_majority: int
    killed_by_majority_fraction: float
    majority_threshold: float
    groups: tuple[GroupStats, ...]
    possibly_equivalent: tuple[str, ...]
    survivors: tuple[SurvivorDiagnosis, ...]
    errors: int
    suites: tuple[str, ...] = ()
    suite_kills: tuple[SuiteKills, ...] = ()
    errored: tuple[str, ...] = ()


PlanCount = int | Literal["all"]

DEFAULT_PLAN_COUNTS: dict[FaultGroup, PlanCount] = {
    FaultGroup.F1: 3,
    FaultGroup.F2: 12,
    FaultGroup.F3: 15,
    FaultGroup.F4: 15,
}


class MutationPlan(BaseModel):
    """How many mutants to draw from each fault group."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    counts: dict[FaultGroup, PlanCount] = Field(default_factory=lambda: dict(DEFAULT_PLAN_COUNTS))
    control: bool = False

    @classmethod
    def exhaustive(cls, control: bool = False) -> MutationPlan:
        return cls(counts={group: "all" for group in FaultGroup}, control=control)
