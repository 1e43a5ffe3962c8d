from __future__ import annotations

from pathlib import Path
from typing import Protocol, runtime_checkable

import numpy as np

from quake.core.models.context import ContextFlow, ContextInstance, ContextSchema
from quake.core.models.coverage import CoverageUniverse
from quake.core.models.mutation import KillMatrix, MutationReport
from quake.core.models.search import SearchConfig


@runtime_checkable
class LocalSearch(Protocol):
    """Strategy that synthesises one flow against the uncovered part of a universe."""

    def __call__(
        self,
        schema: ContextSchema,
        universe: CoverageUniverse,
        cfg: SearchConfig,
        rng: np.random.Generator,
        avoid: frozenset[ContextInstance] = ...,
        flow_id: str = ...,
    ) -> ContextFlow: ...


@runtime_checkable
class FlowStorage(Protocol):
    """Protocol for persisting context flows."""

    def save(self, flows: list[ContextFlow], path: Path) -> Path: ...

    def load(self, path: Path) -> list[ContextFlow]: ...


@runtime_checkable
class Reporter(Protocol):
    """Protocol for rendering mutation experiment results."""

    def generate(self, matrix: KillMatrix, report: MutationReport) -> bytes: ...

    @property
    def content_type(self) -> str: ...

    @property
    def file_extension(self) -> str: ...
