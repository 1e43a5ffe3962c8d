from __future__ import annotations

import msgspec

from quake.adapters.reporters.base import ReporterBase
from quake.core.models.mutation import KillMatrix, MutationReport


class JsonReporter(ReporterBase):
    content_type = "application/json"
    file_extension = "json"

    def __init__(self) -> None:
        self._encoder = msgspec.json.Encoder(order="deterministic")

    def generate(self, matrix: KillMatrix, report: MutationReport) -> bytes:
        payload = {"report": report, "matrix": matrix}
        return msgspec.json.format(self._encoder.encode(payload), indent=2) + b"\n"


def decode_matrix(data: bytes) -> KillMatrix:
    """Read a matrix back from a JSON report or a bare matrix document."""
    raw = msgspec.json.decode(data)
    if isinstance(raw, dict) and "matrix" in raw:
        raw = raw["matrix"]
    return msgspec.convert(raw, type=KillMatrix)
