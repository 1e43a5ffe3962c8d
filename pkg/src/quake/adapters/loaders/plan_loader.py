from __future__ import annotations

from pathlib import Path
from typing import Any

import msgspec
from pydantic import ValidationError

from quake.adapters.loaders.json_schema_loader import decode_json
from quake.core.models.enums import FaultGroup
from quake.core.models.mutation import MutantSpec, MutationPlan
from quake.errors import PlanError

NAMED_PLANS = ("default", "exhaustive-small")


def plan_from_payload(payload: Any) -> MutationPlan | list[MutantSpec]:
    """A plan is a named preset, per-group counts, or an explicit mutant list."""
    if isinstance(payload, MutationPlan):
        return payload
    if isinstance(payload, str):
        if payload == "default":
            return MutationPlan()
        if payload == "exhaustive-small":
            return MutationPlan.exhaustive()
        raise PlanError(f"unknown mutation plan '{payload}' (use one of {', '.join(NAMED_PLANS)})")
    if isinstance(payload, list):
        try:
            return msgspec.convert(payload, type=list[MutantSpec])
        except msgspec.ValidationError as exc:
            raise PlanError(f"invalid mutant list: {exc}") from exc
    if isinstance(payload, dict):
        control = payload.get("control", False)
        unknown = sorted(set(payload) - {group.value for group in FaultGroup} - {"control"})
        if unknown:
            raise PlanError(f"unknown plan keys: {', '.join(unknown)}")
        counts = {FaultGroup(key): value for key, value in payload.items() if key != "control"}
        try:
            return MutationPlan(counts=counts, control=control)
        except ValidationError as exc:
            raise PlanError(f"invalid mutation plan: {exc.errors()[0]['msg']}") from exc
    raise PlanError("a mutation plan must be a name, a mapping of group counts, or a mutant list")


def load_plan(source: str | Path) -> MutationPlan | list[MutantSpec]:
    """Resolve ``--plan``: a preset name or a JSON plan file."""
    if isinstance(source, str) and source in NAMED_PLANS:
        return plan_from_payload(source)
    path = Path(source)
    if not path.is_file():
        raise PlanError(f"plan '{source}' is neither a preset nor a readable file")
    return plan_from_payload(decode_json(path.read_bytes(), PlanError))
