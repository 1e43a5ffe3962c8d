from __future__ import annotations

import re
from pathlib import Path
from typing import Any

import msgspec
from pydantic import ValidationError

from quake.core.models.context import ContextSchema
from quake.core.validator import ValidationIssue, format_issues, validate_schema_payload
from quake.errors import ParseError, SchemaParseError

_BYTE_OFFSET = re.compile(r"\(byte (\d+)\)")


def locate(data: bytes, offset: int) -> tuple[int, int]:
    """1-based (line, column) of a byte offset."""
    head = data[:offset]
    line = head.count(b"\n") + 1
    column = offset - (head.rfind(b"\n") + 1) + 1
    return line, column


def decode_json(data: bytes, error: type[ParseError] = SchemaParseError) -> Any:
    try:
        return msgspec.json.decode(data)
    except msgspec.DecodeError as exc:
        match = _BYTE_OFFSET.search(str(exc))
        if match is None:
            raise error(str(exc)) from exc
        line, column = locate(data, int(match.group(1)))
        message = _BYTE_OFFSET.sub("", str(exc)).strip()
        raise error(message, line, column) from exc


def pydantic_issues(exc: ValidationError) -> list[ValidationIssue]:
    return [
        ValidationIssue(
            path=".".join(str(part) for part in error.get("loc", ())),
            message=error.get("msg", ""),
        )
        for error in exc.errors()
    ]


class JsonSchemaLoader:
    """Loads a context schema file: JSON syntax, structural check, then model validation."""

    def _parse(self, path: Path) -> Any:
        return decode_json(path.read_bytes())

    def _validate_raw(self, raw: Any) -> list[ValidationIssue]:
        issues = validate_schema_payload(raw)
        if issues:
            return issues
        try:
            ContextSchema.model_validate(raw)
        except ValidationError as exc:
            issues.extend(pydantic_issues(exc))
        return issues

    def validate(self, path: Path) -> list[ValidationIssue]:
        return self._validate_raw(self._parse(path))

    def load(self, path: Path) -> ContextSchema:
        raw = self._parse(path)
        issues = self._validate_raw(raw)
        if issues:
            raise SchemaParseError(f"Schema validation failed: {format_issues(issues)}")
        return ContextSchema.model_validate(raw)
