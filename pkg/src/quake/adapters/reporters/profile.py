from __future__ import annotations

import msgspec

from quake.core.models.enums import ShapeClass
from quake.core.models.profile import EarthquakeProfileReport, EpWindow


class ProfileSummary(msgspec.Struct, frozen=True):
    flow_id: str
    length: int
    ep_count: float
    shape: ShapeClass
    oscillation_satisfied: bool
    windows: tuple[EpWindow, ...]


def summarize_profile(flow_id: str, report: EarthquakeProfileReport) -> ProfileSummary:
    return ProfileSummary(
        flow_id=flow_id,
        length=len(report.origin_distance_series),
        ep_count=report.ep_count,
        shape=report.shape,
        oscillation_satisfied=report.oscillation_satisfied,
        windows=report.windows,
    )


def encode_profile(summary: ProfileSummary) -> bytes:
    return msgspec.json.format(msgspec.json.encode(summary), indent=2) + b"\n"
