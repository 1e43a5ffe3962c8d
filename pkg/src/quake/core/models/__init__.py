"""Domain models for quake."""

from quake.core.models.context import (
    ContextFlow,
    ContextInstance,
    ContextSchema,
    EpConfig,
    OriginSpec,
    PropertySpec,
    ShapeThresholds,
    ValidityResult,
    Violation,
)
from quake.core.models.enums import (
    Action,
    Adjective,
    CellOutcome,
    Direction,
    FaultGroup,
    Guard,
    OriginMode,
    PropertyKind,
    SearchAction,
    ShapeClass,
)

__all__ = [
    "Action",
    "Adjective",
    "CellOutcome",
    "ContextFlow",
    "ContextInstance",
    "ContextSchema",
    "Direction",
    "EpConfig",
    "FaultGroup",
    "Guard",
    "OriginMode",
    "OriginSpec",
    "PropertyKind",
    "PropertySpec",
    "SearchAction",
    "ShapeClass",
    "ShapeThresholds",
    "ValidityResult",
    "Violation",
]
