from __future__ import annotations

from collections.abc import Iterable, Sequence
from pathlib import Path

import msgspec

from quake.core.models.policy import VariantFlow, VariantStep
from quake.core.models.search import TraceEvent
from quake.core.utils import atomic_write_bytes
from quake.errors import FlowParseError

_encoder = msgspec.json.Encoder()


def encode_lines(records: Iterable[msgspec.Struct]) -> bytes:
    return b"".join(_encoder.encode(record) + b"\n" for record in records)


def decode_lines[T](data: bytes, kind: type[T]) -> list[T]:
    decoder = msgspec.json.Decoder(kind)
    records: list[T] = []
    for line_no, line in enumerate(data.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(decoder.decode(line))
        except msgspec.DecodeError as exc:
            raise FlowParseError(str(exc), line_no) from exc
    return records


def save_variant_trace(trace: VariantFlow, path: Path) -> Path:
    """One JSON object per simulation step."""
    atomic_write_bytes(path, encode_lines(trace.steps))
    return path


def load_variant_trace(path: Path, flow_id: str | None = None) -> VariantFlow:
    steps = decode_lines(path.read_bytes(), VariantStep)
    return VariantFlow(flow_id=flow_id or path.stem, steps=tuple(steps))


def save_search_trace(events: Sequence[TraceEvent], path: Path) -> Path:
    atomic_write_bytes(path, encode_lines(events))
    return path


def load_search_trace(path: Path) -> list[TraceEvent]:
    return decode_lines(path.read_bytes(), TraceEvent)
