from __future__ import annotations

from collections.abc import Iterable
from pathlib import Path

from quake.core.models.policy import AdaptationPolicy
from quake.core.policy_parser import REFERENCE_PROPERTIES, parse_policy
from quake.errors import PolicySyntaxError


def load_policy(
    path: Path, property_names: Iterable[str] = REFERENCE_PROPERTIES
) -> AdaptationPolicy:
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise PolicySyntaxError(f"policy file is not UTF-8: {exc.reason}") from exc
    return parse_policy(text, property_names)
