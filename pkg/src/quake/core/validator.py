from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

import fastjsonschema  # type: ignore[import-untyped]
from fastjsonschema import JsonSchemaException


@dataclass(frozen=True)
class ValidationIssue:
    path: str
    message: str


_NUMBER = {"type": "number"}
_TRIANGLE = {"type": "array", "items": _NUMBER, "minItems": 3, "maxItems": 3}
_PARTITION = {
    "type": "object",
    "additionalProperties": False,
    "properties": {"low": _TRIANGLE, "medium": _TRIANGLE, "high": _TRIANGLE},
}
_EP = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "rho": _NUMBER,
        "epsilon": _NUMBER,
        "window_max": {"type": "integer"},
        "shape": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "peak_prominence": _NUMBER,
                "peak_start": _NUMBER,
                "peak_end": _NUMBER,
                "min_slope": _NUMBER,
            },
        },
    },
}
_SAMPLES = {"type": "object", "additionalProperties": {"type": "array", "items": _NUMBER}}
_PLAN_COUNT = {"anyOf": [{"type": "integer", "minimum": 0}, {"const": "all"}]}

SCHEMA_FILE_SCHEMA: dict[str, object] = {
    "type": "object",
    "required": ["properties"],
    "additionalProperties": False,
    "properties": {
        "properties": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["name", "kind", "lower", "upper"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "kind": {"enum": ["integer", "real"]},
                    "lower": _NUMBER,
                    "upper": _NUMBER,
                    "step": _NUMBER,
                },
            },
        },
        "constraints": {"type": "array", "items": {"type": "string"}},
        "origin": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "mode": {"enum": ["lower_corner", "midpoint", "explicit"]},
                "explicit_values": {"type": "array", "items": _NUMBER},
            },
        },
        "ep": _EP,
        "coverage_samples": _SAMPLES,
    },
}

CONFIG_SCHEMA: dict[str, object] = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "schema": {"type": "string"},
        "policy": {"type": "string"},
        "search": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "flow_length": {"type": "integer"},
                "tabu_tenure": {"type": ["integer", "null"]},
                "mem_max_age": {"type": "integer"},
                "stale_limit": {"type": "integer"},
                "hard_limit": {"type": "integer"},
                "local_iterations": {"type": "integer"},
                "neighborhood": {"type": "integer"},
                "lambda_size": _NUMBER,
                "seed": {"type": "integer"},
                "aspiration": {"type": "boolean"},
                "max_memory_overlap": {"type": "integer"},
                "sample_bias": _NUMBER,
                "rounds": {"type": "integer"},
                "weights": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "w_cov_local": _NUMBER,
                        "w_ep": _NUMBER,
                        "w_re": _NUMBER,
                        "w_cov_global": _NUMBER,
                        "w_shape": _NUMBER,
                    },
                },
            },
        },
        "ep": _EP,
        "coverage_samples": _SAMPLES,
        "mutation_plan": {
            "anyOf": [
                {"enum": ["default", "exhaustive-small"]},
                {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "F1": _PLAN_COUNT,
                        "F2": _PLAN_COUNT,
                        "F3": _PLAN_COUNT,
                        "F4": _PLAN_COUNT,
                        "control": {"type": "boolean"},
                    },
                },
            ]
        },
        "initial_variant": {"type": "string"},
        "fuzzy_sets": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "default": _PARTITION,
                "properties": {"type": "object", "additionalProperties": _PARTITION},
            },
        },
        "reality": {"type": "object", "additionalProperties": {"type": "array", "items": _NUMBER}},
    },
}

_validators: dict[str, Callable[[Any], Any]] = {
    "schema": fastjsonschema.compile(SCHEMA_FILE_SCHEMA),
    "config": fastjsonschema.compile(CONFIG_SCHEMA),
}


def _validate(kind: str, payload: object) -> list[ValidationIssue]:
    try:
        _validators[kind](payload)
    except JsonSchemaException as exc:
        path = ".".join(str(part) for part in exc.path[1:]) if exc.path else ""
        return [ValidationIssue(path=path, message=exc.message)]
    return []


def validate_schema_payload(payload: object) -> list[ValidationIssue]:
    return _validate("schema", payload)


def validate_config_payload(payload: object) -> list[ValidationIssue]:
    return _validate("config", payload)


def format_issues(issues: list[ValidationIssue]) -> str:
    return "; ".join(f"{issue.path or '<root>'}: {issue.message}" for issue in issues)
