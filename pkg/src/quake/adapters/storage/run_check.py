"""Re-reads every output a command listed in its manifest."""

from __future__ import annotations

from pathlib import Path

import attrs
import msgspec
import structlog
from pydantic import ValidationError

from quake.adapters.reporters.json import decode_matrix
from quake.adapters.storage.suite_store import INDEX_FILE, RESULT_FILE, TRACE_FILE, SuiteStore
from quake.adapters.storage.trace_store import load_search_trace, load_variant_trace
from quake.core.models.context import ContextSchema
from quake.core.models.manifest import MANIFEST_FILE, RunManifest, decode_manifest
from quake.core.mutation import MUTANTS_FILE, decode_mutants
from quake.errors import ParseError
from quake.templates.registry import read_template

log: structlog.stdlib.BoundLogger = structlog.get_logger(__name__)


@attrs.frozen
class RunCheck:
    manifest: RunManifest
    checked: tuple[str, ...]
    flows: int = 0
    steps: int = 0


def _schema(manifest: RunManifest) -> ContextSchema:
    raw = manifest.config.get("schema")
    if not isinstance(raw, dict):
        return ContextSchema.model_validate_json(read_template("schema"))
    try:
        return ContextSchema.model_validate(raw)
    except ValidationError as exc:
        raise ParseError(f"manifest schema is invalid: {exc.errors()[0]['msg']}") from exc


def _read_manifest(run_dir: Path) -> RunManifest:
    path = run_dir / MANIFEST_FILE
    if not path.is_file():
        raise ParseError(f"{run_dir} has no {MANIFEST_FILE}")
    try:
        return decode_manifest(path.read_bytes())
    except msgspec.DecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def check_run(run_dir: Path) -> RunCheck:
    """Decode each listed output with the reader its command's consumers use.

    Flow suites, search results, traces, mutant lists and kill matrices are
    parsed in full; other outputs only have to exist.
    """
    manifest = _read_manifest(run_dir)
    flows = 0
    steps = 0
    for name in manifest.outputs:
        path = run_dir / name
        if not path.is_file():
            raise ParseError(f"{name} is listed in {MANIFEST_FILE} but missing")
        try:
            if name == INDEX_FILE:
                flows += len(SuiteStore(run_dir, _schema(manifest)).load())
            elif name == RESULT_FILE:
                SuiteStore(run_dir, _schema(manifest)).load_result()
            elif name == TRACE_FILE:
                load_search_trace(path)
            elif name.endswith(".trace.jsonl"):
                steps += len(load_variant_trace(path).steps)
            elif name == MUTANTS_FILE:
                decode_mutants(path.read_bytes())
            elif name.endswith("_report.json"):
                decode_matrix(path.read_bytes())
            else:
                path.read_bytes()
        except msgspec.DecodeError as exc:
            raise ParseError(f"{name}: {exc}") from exc
    log.debug("run_checked", run_dir=str(run_dir), outputs=len(manifest.outputs))
    return RunCheck(manifest=manifest, checked=tuple(manifest.outputs), flows=flows, steps=steps)
