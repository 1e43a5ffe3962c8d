from __future__ import annotations

from pathlib import Path

import typer
from msgspec import DecodeError, ValidationError
from rich.console import Console

from quake.adapters.reporters.base import ReporterBase
from quake.adapters.reporters.csv import CsvReporter, SuiteKillsCsvReporter
from quake.adapters.reporters.json import JsonReporter, decode_matrix
from quake.adapters.reporters.text import TextReporter
from quake.cli.commands.common import error_boundary
from quake.cli.ui.tables import render_mutation_summary
from quake.core.mutation import MAJORITY_THRESHOLD, build_report
from quake.core.utils import atomic_write_bytes
from quake.errors import ConfigError, ParseError

_REPORTERS: dict[str, type[ReporterBase]] = {
    "csv": CsvReporter,
    "suite-csv": SuiteKillsCsvReporter,
    "json": JsonReporter,
    "text": TextReporter,
    "txt": TextReporter,
}


def report_command(
    report_path: Path,
    format: str,
    output_path: Path | None,
    overwrite: bool,
    majority: float = MAJORITY_THRESHOLD,
    template_path: Path | None = None,
) -> None:
    """Rebuild the mutation report from a saved matrix; scores are recomputed from cells."""
    console = Console()
    with error_boundary() as err:
        reporter_cls = _REPORTERS.get(format.lower())
        if reporter_cls is None:
            valid_formats = ", ".join(sorted(_REPORTERS))
            raise ConfigError(f"Unsupported format: {format}. Use one of: {valid_formats}.")
        if not 0.0 <= majority < 1.0:
            raise ConfigError("--majority must lie in [0, 1)")
        try:
            matrix = decode_matrix(report_path.read_bytes())
        except (DecodeError, ValidationError) as exc:
            raise ParseError(f"Failed to read kill matrix {report_path}: {exc}") from exc
        report = build_report(matrix, majority_threshold=majority)

        if template_path and reporter_cls is not TextReporter:
            err.print("[yellow]Warning: --template is only used with text format.[/yellow]")
        reporter: ReporterBase
        if reporter_cls is TextReporter:
            reporter = TextReporter(template_path=template_path)
        else:
            reporter = reporter_cls()
        content = reporter.generate(matrix, report)

        if output_path is None:
            typer.echo(content.decode("utf-8"), nl=False)
            return
        if output_path.exists():
            if output_path.is_dir():
                raise ConfigError("Output path is a directory.")
            if not overwrite:
                raise ConfigError("Output file already exists. Use --overwrite to replace.")
        if not output_path.parent.is_dir():
            raise ConfigError("Output directory does not exist.")
        atomic_write_bytes(output_path, content)
    render_mutation_summary(report, console)
