from __future__ import annotations

from pathlib import Path
from typing import Any

from pydantic import ValidationError
from ruamel.yaml import YAML
from ruamel.yaml.error import MarkedYAMLError, YAMLError

from quake.adapters.loaders.json_schema_loader import pydantic_issues
from quake.adapters.loaders.plan_loader import plan_from_payload
from quake.core.models.config import QuakeConfig
from quake.core.validator import ValidationIssue, format_issues, validate_config_payload
from quake.errors import ConfigError, PlanError


class YamlConfigLoader:
    def __init__(self) -> None:
        self._yaml = YAML(typ="safe")

    def _parse(self, path: Path) -> dict[str, Any]:
        try:
            parsed = self._yaml.load(path.read_text(encoding="utf-8"))
        except UnicodeDecodeError as exc:
            raise ConfigError(f"{path} is not UTF-8: {exc.reason}") from exc
        except MarkedYAMLError as exc:
            mark = exc.problem_mark
            line = mark.line + 1 if mark is not None else None
            column = mark.column + 1 if mark is not None else None
            raise ConfigError(exc.problem or str(exc), line, column) from exc
        except YAMLError as exc:
            raise ConfigError(str(exc)) from exc
        if parsed is None:
            return {}
        if not isinstance(parsed, dict):
            raise ConfigError("Config YAML must be a mapping at the top level.")
        return parsed

    def _build(
        self, raw: dict[str, Any], base: Path
    ) -> tuple[QuakeConfig | None, list[ValidationIssue]]:
        issues = validate_config_payload(raw)
        if issues:
            return None, issues
        data = dict(raw)
        if "mutation_plan" in data:
            try:
                data["mutation_plan"] = plan_from_payload(data["mutation_plan"])
            except PlanError as exc:
                return None, [ValidationIssue(path="mutation_plan", message=str(exc))]
        for key in ("schema", "policy"):
            if key in data:
                data[key] = (base / data[key]).resolve()
        try:
            return QuakeConfig.model_validate(data), []
        except ValidationError as exc:
            return None, pydantic_issues(exc)

    def validate(self, path: Path) -> list[ValidationIssue]:
        return self._build(self._parse(path), path.parent)[1]

    def load(self, path: Path) -> QuakeConfig:
        config, issues = self._build(self._parse(path), path.parent)
        if config is None:
            raise ConfigError(f"Config validation failed: {format_issues(issues)}")
        return config
