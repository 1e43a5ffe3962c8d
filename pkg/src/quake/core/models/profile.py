from __future__ import annotations

import msgspec

from quake.core.models.enums import Direction, ShapeClass


class EpWindow(msgspec.Struct, frozen=True):
    """A violent variation between instance ``start_index`` and ``end_index`` (inclusive)."""

    start_index: int
    end_index: int
    direction: Direction

    @property
    def transitions(self) -> int:
        return self.end_index - self.start_index


class EarthquakeProfileReport(msgspec.Struct, frozen=True):
    windows: tuple[EpWindow, ...]
    ep_count: float
    oscillation_satisfied: bool
    origin_distance_series: tuple[float, ...]
    shape: ShapeClass
