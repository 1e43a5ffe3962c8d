from __future__ import annotations

from functools import lru_cache
from importlib import resources
from pathlib import Path

from jinja2 import Environment, StrictUndefined, Template, TemplateSyntaxError

from quake.adapters.reporters.base import ReporterBase
from quake.core.models.mutation import KillMatrix, MutationReport
from quake.errors import ConfigError


def _percent(value: float) -> str:
    return f"{value * 100:.1f}%"


def _environment() -> Environment:
    env = Environment(
        autoescape=False, undefined=StrictUndefined, trim_blocks=True, lstrip_blocks=True
    )
    env.filters["percent"] = _percent
    return env


class TextReporter(ReporterBase):
    """Human-readable mutation summary."""

    content_type = "text/plain"
    file_extension = "txt"

    def __init__(self, template_path: Path | None = None) -> None:
        self._custom_template_path = template_path

    @staticmethod
    @lru_cache(maxsize=1)
    def _default_template() -> Template:
        template_text = (
            resources.files("quake.templates.reports")
            .joinpath("mutation_report.txt.j2")
            .read_text(encoding="utf-8")
        )
        return _environment().from_string(template_text)

    def _get_template(self) -> Template:
        if self._custom_template_path:
            path = self._custom_template_path
            try:
                return _environment().from_string(path.read_text(encoding="utf-8"))
            except UnicodeDecodeError as exc:
                raise ConfigError(f"{path} is not UTF-8: {exc.reason}") from exc
            except TemplateSyntaxError as exc:
                raise ConfigError(f"template {path}: {exc.message}", exc.lineno) from exc
        return self._default_template()

    def generate(self, matrix: KillMatrix, report: MutationReport) -> bytes:
        rows = [
            {
                "id": row.mutant.id,
                "group": row.mutant.group or "-",
                "kills": row.kills,
                "fraction": row.kill_fraction,
                "description": row.mutant.description,
            }
            for row in matrix.rows
        ]
        suites = sorted({column.suite for column in matrix.columns})
        rendered = self._get_template().render(report=report, rows=rows, suites=suites)
        return rendered.encode("utf-8")
