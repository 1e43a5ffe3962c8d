from __future__ import annotations

from enum import StrEnum


class PropertyKind(StrEnum):
    INTEGER = "integer"
    REAL = "real"


class OriginMode(StrEnum):
    LOWER_CORNER = "lower_corner"
    MIDPOINT = "midpoint"
    EXPLICIT = "explicit"


class ConstraintKind(StrEnum):
    COMPARISON = "comparison"
    CONDITIONAL = "conditional"


class ViolationKind(StrEnum):
    BOUND = "bound"
    GRID = "grid"
    CONSTRAINT = "constraint"


class Direction(StrEnum):
    ESCALATING = "escalating"
    COLLAPSING = "collapsing"


class ShapeClass(StrEnum):
    RAMP = "ramp"
    PLATEAU_OSCILLATION = "plateau_oscillation"
    CRESCENDO_PEAK = "crescendo_peak"
    UNCLASSIFIED = "unclassified"


class SearchAction(StrEnum):
    PROMOTE = "promote"
    SHELVE = "shelve"
    EVICT = "evict"
    ACCEPT_NEW = "accept_new"


class Adjective(StrEnum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"


class Action(StrEnum):
    ADDCACHE = "ADDCACHE"
    REMOVECACHE = "REMOVECACHE"
    ADDSERVER = "ADDSERVER"
    REMOVESERVER = "REMOVESERVER"
    GROWCACHE = "GROWCACHE"
    SHRINKCACHE = "SHRINKCACHE"


class Guard(StrEnum):
    CACHE_PRESENT = "cache_present"
    CACHE_ABSENT = "cache_absent"
    SERVERS_AT_MAX = "servers_at_max"
    SERVERS_AT_MIN = "servers_at_min"


class FaultGroup(StrEnum):
    F1 = "F1"
    F2 = "F2"
    F3 = "F3"
    F4 = "F4"


class CellOutcome(StrEnum):
    KILLED = "killed"
    SURVIVED = "survived"
    ERROR = "error"


ADJECTIVE_ORDER: tuple[Adjective, ...] = (Adjective.LOW, Adjective.MEDIUM, Adjective.HIGH)
