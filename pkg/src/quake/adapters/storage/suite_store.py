"""On-disk layout of a generated AEQ suite.

    <dir>/suite.json             index of the flows in generation order
    <dir>/flows/<flow_id>.csv    one flow file per AEQ
    <dir>/profiles/<flow_id>.csv (seq, origin_distance) plot data
    <dir>/search_result.json     the full search result
    <dir>/universe.csv           target pairs with their covered flag
    <dir>/search_trace.jsonl     global iteration trace, when requested
"""

from __future__ import annotations

import csv
import io
import re
from collections.abc import Sequence
from pathlib import Path

import msgspec
from msgspec import structs

from quake.adapters.storage.flow_store import FlowCsvStore
from quake.adapters.storage.trace_store import save_search_trace
from quake.core.metric import origin_distance_series
from quake.core.models.context import ContextFlow, ContextSchema
from quake.core.models.coverage import CoverageUniverse
from quake.core.models.search import SearchResult
from quake.core.utils import atomic_write_bytes
from quake.errors import FlowParseError

INDEX_FILE = "suite.json"
RESULT_FILE = "search_result.json"
UNIVERSE_FILE = "universe.csv"
TRACE_FILE = "search_trace.jsonl"

_SAFE_ID = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.-]*$")


class SuiteEntry(msgspec.Struct, frozen=True):
    flow_id: str
    file: str
    length: int
    profile: str | None = None


class SuiteIndex(msgspec.Struct, frozen=True):
    name: str
    flows: tuple[SuiteEntry, ...]


_encoder = msgspec.json.Encoder(order="deterministic")


def _pretty(value: object) -> bytes:
    return msgspec.json.format(_encoder.encode(value), indent=2) + b"\n"


def encode_profile(series: Sequence[float]) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["seq", "origin_distance"])
    writer.writerows([seq, repr(float(value))] for seq, value in enumerate(series))
    return buffer.getvalue().encode("utf-8")


def encode_universe(schema: ContextSchema, universe: CoverageUniverse) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["prop_a", "val_a", "prop_b", "val_b", "covered"])
    specs = schema.properties
    for pair in sorted(universe.pairs):
        writer.writerow(
            [
                specs[pair.prop_a].name,
                specs[pair.prop_a].format(pair.val_a),
                specs[pair.prop_b].name,
                specs[pair.prop_b].format(pair.val_b),
                int(pair in universe.covered),
            ]
        )
    return buffer.getvalue().encode("utf-8")


class SuiteStore:
    def __init__(self, base_dir: Path, schema: ContextSchema) -> None:
        self._base_dir = base_dir
        self._schema = schema
        self._flows = FlowCsvStore(schema)

    @property
    def base_dir(self) -> Path:
        return self._base_dir

    def _flow_path(self, flow_id: str) -> Path:
        if not _SAFE_ID.fullmatch(flow_id):
            raise ValueError(f"flow id {flow_id!r} cannot be used as a file name")
        return self._base_dir / "flows" / f"{flow_id}.csv"

    def save(
        self,
        result: SearchResult,
        universe: CoverageUniverse,
        *,
        with_trace: bool = False,
    ) -> list[Path]:
        written: list[Path] = []
        entries: list[SuiteEntry] = []
        for flow in result.solution:
            flow_path = self._flows.save([flow], self._flow_path(flow.id))
            profile_path = self._base_dir / "profiles" / f"{flow.id}.csv"
            series = origin_distance_series(self._schema, flow)
            atomic_write_bytes(profile_path, encode_profile(series))
            written += [flow_path, profile_path]
            entries.append(
                SuiteEntry(
                    flow_id=flow.id,
                    file=flow_path.relative_to(self._base_dir).as_posix(),
                    length=len(flow),
                    profile=profile_path.relative_to(self._base_dir).as_posix(),
                )
            )
        index = SuiteIndex(name=self._base_dir.name, flows=tuple(entries))
        outputs = {
            INDEX_FILE: _pretty(index),
            RESULT_FILE: _pretty(structs.replace(result, trace=None)),
            UNIVERSE_FILE: encode_universe(self._schema, universe),
        }
        for name, payload in outputs.items():
            atomic_write_bytes(self._base_dir / name, payload)
            written.append(self._base_dir / name)
        if with_trace and result.trace is not None:
            written.append(save_search_trace(result.trace, self._base_dir / TRACE_FILE))
        return written

    def load(self) -> list[ContextFlow]:
        """Flows in index order; a directory without an index yields its CSV files by name."""
        index_path = self._base_dir / INDEX_FILE
        if index_path.is_file():
            try:
                index = msgspec.json.decode(index_path.read_bytes(), type=SuiteIndex)
            except msgspec.DecodeError as exc:
                raise FlowParseError(f"{index_path}: {exc}") from exc
            paths = [self._base_dir / entry.file for entry in index.flows]
        else:
            paths = sorted(self._base_dir.glob("*.csv"))
            paths += sorted(self._base_dir.glob("flows/*.csv"))
        flows = [flow for path in paths for flow in self._flows.load(path)]
        if not flows:
            raise FlowParseError(f"suite directory {self._base_dir} holds no flows")
        return flows

    def load_result(self) -> SearchResult:
        return msgspec.json.decode((self._base_dir / RESULT_FILE).read_bytes(), type=SearchResult)
