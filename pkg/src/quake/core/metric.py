"""Distance geometry of the context space and earthquake-profile detection."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from scipy.stats import linregress

from quake.core.models.context import (
    ContextFlow,
    ContextInstance,
    ContextSchema,
    EpConfig,
    ShapeThresholds,
)
from quake.core.models.enums import Direction, OriginMode, ShapeClass
from quake.core.models.profile import EarthquakeProfileReport, EpWindow
from quake.errors import PreconditionError, StructureError

MIN_PROFILE_LENGTH = 3


def _check_arity(schema: ContextSchema, *instances: Sequence[float]) -> None:
    for inst in instances:
        if len(inst) != schema.arity:
            raise StructureError(
                f"Instance has {len(inst)} values but the schema declares "
                f"{schema.arity} properties."
            )


def distance(schema: ContextSchema, a: ContextInstance, b: ContextInstance) -> float:
    _check_arity(schema, a, b)
    return float(np.linalg.norm(schema.coordinates(a) - schema.coordinates(b)))


def resolve_origin(schema: ContextSchema) -> np.ndarray:
    """Origin point in normalised coordinates."""
    mode = schema.origin.mode
    if mode is OriginMode.MIDPOINT:
        return np.full(schema.arity, 0.5)
    if mode is OriginMode.EXPLICIT and schema.origin.explicit_values is not None:
        return schema.coordinates(schema.origin.explicit_values)
    return np.zeros(schema.arity)


def flow_coordinates(schema: ContextSchema, flow: ContextFlow) -> np.ndarray:
    rows = np.asarray(flow.instances, dtype=float)
    if rows.ndim != 2 or rows.shape[1] != schema.arity:
        raise StructureError(f"flow {flow.id} does not match the schema arity {schema.arity}")
    return schema.coordinates(rows)


def origin_distance_series(schema: ContextSchema, flow: ContextFlow) -> list[float]:
    coords = flow_coordinates(schema, flow)
    return np.linalg.norm(coords - resolve_origin(schema), axis=1).tolist()


def transition_distances(schema: ContextSchema, flow: ContextFlow) -> list[float]:
    """Distances between consecutive instances; one fewer than the flow length."""
    coords = flow_coordinates(schema, flow)
    return np.linalg.norm(np.diff(coords, axis=0), axis=1).tolist()


def window_direction(
    d: Sequence[float], first: int, last: int, cfg: EpConfig
) -> Direction | None:
    """Direction of the window spanning transitions ``first..last``, if it is violent."""
    head, tail = d[first], d[last]
    if tail >= cfg.epsilon and tail >= cfg.rho * head:
        return Direction.ESCALATING
    if head >= cfg.epsilon and head >= cfg.rho * tail:
        return Direction.COLLAPSING
    return None


def scan_windows(d: Sequence[float], cfg: EpConfig) -> list[EpWindow]:
    """Maximum set of transition-disjoint violent windows.

    Windows are chosen by earliest end transition; for each end the longest
    qualifying window is kept. Earliest-end selection maximises the count, and
    the count is the same for the reversed flow.
    """
    windows: list[EpWindow] = []
    free_from = 0
    for last in range(1, len(d)):
        for first in range(max(free_from, last - cfg.window_max + 1), last):
            direction = window_direction(d, first, last, cfg)
            if direction is not None:
                windows.append(EpWindow(first, last + 1, direction))
                free_from = last + 1
                break
    return windows


def window_states(d: Sequence[float], cfg: EpConfig) -> list[tuple[int, int]]:
    """Greedy window-count scan state ``(count, free_from)`` before each end transition.

    Entry ``last`` is the state before ``last`` is tried as a window end; the final
    entry holds the totals.
    """
    states = [(0, 0)]
    count = 0
    free_from = 0
    rho, epsilon, jmax = cfg.rho, cfg.epsilon, cfg.window_max
    for last in range(1, len(d)):
        states.append((count, free_from))
        tail = d[last]
        for first in range(max(free_from, last - jmax + 1), last):
            head = d[first]
            if (tail >= epsilon and tail >= rho * head) or (head >= epsilon and head >= rho * tail):
                count += 1
                free_from = last + 1
                break
    states.append((count, free_from))
    return states


def count_windows(d: Sequence[float], cfg: EpConfig) -> int:
    return window_states(d, cfg)[-1][0]


def recount_windows(
    d: Sequence[float],
    cfg: EpConfig,
    states: Sequence[tuple[int, int]],
    first_changed: int,
    last_changed: int,
) -> int:
    """Window count of ``d`` that differs from the scanned sequence only in
    ``first_changed..last_changed``; stops once the scan rejoins the old states.
    """
    rho, epsilon, jmax = cfg.rho, cfg.epsilon, cfg.window_max
    start = max(1, first_changed)
    count, free_from = states[start]
    settled = last_changed + jmax
    for last in range(start, len(d)):
        if last >= settled and free_from == states[last][1]:
            return count + states[-1][0] - states[last][0]
        tail = d[last]
        for first in range(max(free_from, last - jmax + 1), last):
            head = d[first]
            if (tail >= epsilon and tail >= rho * head) or (head >= epsilon and head >= rho * tail):
                count += 1
                free_from = last + 1
                break
    return count


def oscillation_satisfied(series: Sequence[float]) -> bool:
    """Every interior point is a non-strict local maximum or minimum."""
    for i in range(1, len(series) - 1):
        prev, cur, nxt = series[i - 1], series[i], series[i + 1]
        if not ((cur >= prev and cur >= nxt) or (cur <= prev and cur <= nxt)):
            return False
    return True


def classify_shape(
    series: Sequence[float], thresholds: ShapeThresholds | None = None
) -> ShapeClass:
    if len(series) < MIN_PROFILE_LENGTH:
        raise PreconditionError(
            f"Shape classification needs at least {MIN_PROFILE_LENGTH} points, got {len(series)}"
        )
    limits = thresholds or ShapeThresholds()
    values = np.asarray(series, dtype=float)
    if not np.all(np.isfinite(values)):
        return ShapeClass.UNCLASSIFIED

    slope = float(linregress(np.arange(values.size), values).slope)
    spread = float(values.max() - values.min())
    prominence = 0.0 if spread == 0 else float(values.max() - values.mean()) / spread

    peak = int(values.argmax())
    position = peak / (values.size - 1)
    if prominence >= limits.peak_prominence and limits.peak_start < position < limits.peak_end:
        steps = np.abs(np.diff(values[: peak + 1]))
        building = steps.size < 2 or float(np.diff(steps).mean()) >= 0
        if building:
            return ShapeClass.CRESCENDO_PEAK
    if abs(slope) >= limits.min_slope:
        return ShapeClass.RAMP
    return ShapeClass.PLATEAU_OSCILLATION


def detect_ep(schema: ContextSchema, flow: ContextFlow, cfg: EpConfig) -> EarthquakeProfileReport:
    if len(flow) < MIN_PROFILE_LENGTH:
        raise PreconditionError(
            f"flow {flow.id} has {len(flow)} instances; "
            f"profile detection needs at least {MIN_PROFILE_LENGTH}"
        )
    series = origin_distance_series(schema, flow)
    windows = scan_windows(transition_distances(schema, flow), cfg)
    return EarthquakeProfileReport(
        windows=tuple(windows),
        ep_count=float(len(windows)),
        oscillation_satisfied=oscillation_satisfied(series),
        origin_distance_series=tuple(series),
        shape=classify_shape(series, cfg.shape),
    )


def ep_score(schema: ContextSchema, flow: ContextFlow, cfg: EpConfig) -> float:
    return detect_ep(schema, flow, cfg).ep_count
