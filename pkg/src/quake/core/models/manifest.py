from __future__ import annotations

from datetime import UTC, datetime
from typing import Any

import msgspec

MANIFEST_FILE = "manifest.json"


class RunManifest(msgspec.Struct, frozen=True):
    """Everything needed to repeat a command: inputs, resolved settings, seed."""

    command: str
    version: str
    seed: int | None
    config: dict[str, Any]
    inputs: dict[str, str]
    outputs: list[str]
    started_at: datetime
    finished_at: datetime


def now() -> datetime:
    return datetime.now(UTC)


_encoder = msgspec.json.Encoder(order="sorted")


def encode_manifest(manifest: RunManifest) -> bytes:
    return msgspec.json.format(_encoder.encode(manifest), indent=2) + b"\n"


def decode_manifest(data: bytes) -> RunManifest:
    return msgspec.json.decode(data, type=RunManifest)
