"""Input resolution, the error boundary, and manifests shared by the commands."""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from contextlib import contextmanager
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Any, TypedDict

import structlog
import typer
from rich.console import Console
from rich.markup import escape

from quake import __version__
from quake.adapters.loaders.json_schema_loader import JsonSchemaLoader
from quake.adapters.loaders.policy_loader import load_policy
from quake.adapters.loaders.yaml_config_loader import YamlConfigLoader
from quake.core.models.config import QuakeConfig
from quake.core.models.context import ContextSchema
from quake.core.models.manifest import MANIFEST_FILE, RunManifest, encode_manifest, now
from quake.core.models.policy import AdaptationPolicy, Variant
from quake.core.policy_parser import parse_policy
from quake.core.utils import atomic_write_bytes, ensure_output_dir, file_digests, sha256_digest
from quake.errors import ConfigError, QuakeError, exit_code_for
from quake.templates.registry import read_template, template_filename

log: structlog.stdlib.BoundLogger = structlog.get_logger(__name__)


@contextmanager
def error_boundary() -> Iterator[Console]:
    """Map failures onto exit-code categories with a red diagnostic on stderr."""
    err = Console(stderr=True)
    try:
        yield err
    except typer.Exit:
        raise
    except QuakeError as exc:
        log.debug("command_failed", error=str(exc), exit_code=exc.exit_code)
        err.print(f"[red]{escape(str(exc))}[/red]")
        raise typer.Exit(code=exc.exit_code) from exc
    except OSError as exc:
        target = escape(str(exc.filename or ""))
        err.print(f"[red]Cannot access {target}: {escape(exc.strerror or str(exc))}[/red]")
        raise typer.Exit(code=2) from exc
    except UnicodeDecodeError as exc:
        err.print(f"[red]Input is not UTF-8: {escape(exc.reason)}[/red]")
        raise typer.Exit(code=2) from exc
    except Exception as exc:
        log.exception("command_crashed")
        err.print(f"[red]Internal error: {escape(str(exc))}[/red]")
        raise typer.Exit(code=exit_code_for(exc)) from exc


class EpOverrides(TypedDict, total=False):
    rho: float | None
    epsilon: float | None
    window_max: int | None


@dataclass(frozen=True)
class RunInputs:
    config: QuakeConfig
    schema: ContextSchema
    digests: dict[str, str]
    started_at: datetime

    def policy(self, policy_path: Path | None = None) -> AdaptationPolicy:
        """``--policy`` beats the config file, which beats the shipped reference policy."""
        path = policy_path or self.config.policy_path
        if path is None:
            self.digests[f"<builtin>/{template_filename('policy')}"] = sha256_digest(
                read_template("policy").encode("utf-8")
            )
            return parse_policy(read_template("policy"), self.schema.names)
        self.digests.update(file_digests([path]))
        return load_policy(path, self.schema.names)

    def initial_variant(self, text: str | None = None) -> Variant:
        try:
            return Variant.parse(text) if text else self.config.initial
        except ValueError as exc:
            raise ConfigError(f"invalid initial variant: {exc}") from exc


def resolve_inputs(
    config_path: Path | None,
    schema_path: Path | None,
    ep_overrides: EpOverrides | None = None,
) -> RunInputs:
    """Load config and schema.

    EP flags override the config, whose ``ep``/``coverage_samples`` override the schema file.
    """
    started_at = now()
    digests: dict[str, str] = {}
    config = QuakeConfig()
    if config_path is not None:
        config = YamlConfigLoader().load(config_path)
        digests.update(file_digests([config_path]))
    path = schema_path or config.schema_path
    if path is None:
        text = read_template("schema")
        schema = ContextSchema.model_validate_json(text)
        digests[f"<builtin>/{template_filename('schema')}"] = sha256_digest(text.encode("utf-8"))
    else:
        schema = JsonSchemaLoader().load(path)
        digests.update(file_digests([path]))
    if ep_overrides:
        config = config.with_ep_overrides(schema, **ep_overrides)
    return RunInputs(
        config=config,
        schema=config.apply_to(schema),
        digests=digests,
        started_at=started_at,
    )


def prepare_output(out_dir: Path) -> None:
    try:
        ensure_output_dir(out_dir)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def write_manifest(
    out_dir: Path,
    command: str,
    inputs: RunInputs,
    outputs: Sequence[Path],
    *,
    seed: int | None,
    settings: dict[str, Any],
) -> Path:
    manifest = RunManifest(
        command=command,
        version=__version__,
        seed=seed,
        config=settings,
        inputs=dict(sorted(inputs.digests.items())),
        outputs=sorted(_relative(path, out_dir) for path in outputs),
        started_at=inputs.started_at,
        finished_at=now(),
    )
    path = out_dir / MANIFEST_FILE
    atomic_write_bytes(path, encode_manifest(manifest))
    log.info("manifest_written", path=str(path), outputs=len(outputs))
    return path


def _relative(path: Path, base: Path) -> str:
    try:
        return path.relative_to(base).as_posix()
    except ValueError:
        return path.as_posix()
