from __future__ import annotations

from importlib import resources

_TEMPLATE_MAP = {
    "schema": ("quake.templates.schemas", "web_server.json"),
    "policy": ("quake.templates.policies", "web_server.policy"),
    "config": ("quake.templates.configs", "default.yaml"),
}


def template_keys() -> list[str]:
    return sorted(_TEMPLATE_MAP.keys())


def template_filename(key: str) -> str | None:
    entry = _TEMPLATE_MAP.get(key)
    return entry[1] if entry else None


def read_template(key: str) -> str:
    package, filename = _TEMPLATE_MAP[key]
    return resources.files(package).joinpath(filename).read_text(encoding="utf-8")
