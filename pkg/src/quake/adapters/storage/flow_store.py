from __future__ import annotations

import csv
import io
from collections.abc import Sequence
from pathlib import Path

from quake.core.context import make_instance
from quake.core.models.context import ContextFlow, ContextInstance, ContextSchema
from quake.core.utils import atomic_write_bytes
from quake.errors import ConstraintViolationError, FlowParseError, StructureError

FLOW_PREFIX = ("flow_id", "seq")


def flow_header(schema: ContextSchema) -> list[str]:
    return [*FLOW_PREFIX, *schema.names]


def encode_flows(schema: ContextSchema, flows: Sequence[ContextFlow]) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(flow_header(schema))
    for flow in flows:
        for seq, instance in enumerate(flow.instances):
            writer.writerow(
                [flow.id, seq]
                + [
                    spec.format(value)
                    for spec, value in zip(schema.properties, instance, strict=True)
                ]
            )
    return buffer.getvalue().encode("utf-8")


def decode_flows(schema: ContextSchema, text: str) -> list[ContextFlow]:
    """Parse flow CSV; only valid instances are admitted."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        raise FlowParseError("flow file is empty", 1)
    expected = flow_header(schema)
    if [cell.strip() for cell in header] != expected:
        raise FlowParseError(f"expected header {','.join(expected)}, got {','.join(header)}", 1)

    grouped: dict[str, list[ContextInstance]] = {}
    last_seq: dict[str, int] = {}
    for row in reader:
        line = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(expected):
            raise FlowParseError(f"expected {len(expected)} fields, got {len(row)}", line)
        flow_id = row[0].strip()
        if not flow_id:
            raise FlowParseError("flow_id is empty", line, 1)
        try:
            seq = int(row[1])
        except ValueError:
            raise FlowParseError(f"seq {row[1]!r} is not an integer", line, 2) from None
        if seq <= last_seq.get(flow_id, -1):
            raise FlowParseError(f"seq {seq} of flow {flow_id} is not ascending", line, 2)
        last_seq[flow_id] = seq
        values: list[float] = []
        for column, cell in enumerate(row[2:], start=3):
            try:
                values.append(float(cell))
            except ValueError:
                raise FlowParseError(f"{cell!r} is not a number", line, column) from None
        try:
            grouped.setdefault(flow_id, []).append(make_instance(schema, values))
        except (ConstraintViolationError, StructureError) as exc:
            raise ConstraintViolationError(f"line {line}: {exc}") from exc
    return [ContextFlow(id=flow_id, instances=tuple(items)) for flow_id, items in grouped.items()]


class FlowCsvStore:
    """Reads and writes flows as ``flow_id,seq,<property names>`` CSV."""

    def __init__(self, schema: ContextSchema) -> None:
        self._schema = schema

    def save(self, flows: list[ContextFlow], path: Path) -> Path:
        atomic_write_bytes(path, encode_flows(self._schema, flows))
        return path

    def load(self, path: Path) -> list[ContextFlow]:
        try:
            text = path.read_text(encoding="utf-8")
        except UnicodeDecodeError as exc:
            raise FlowParseError(f"{path} is not UTF-8: {exc.reason}") from exc
        flows = decode_flows(self._schema, text)
        if not flows:
            raise FlowParseError(f"{path} holds no flows")
        return flows
