from __future__ import annotations

from pathlib import Path

import typer
from rich.console import Console

from quake.cli.commands.common import error_boundary
from quake.core.utils import atomic_write_bytes
from quake.errors import ConfigError
from quake.templates.registry import read_template, template_filename, template_keys

ALL_TEMPLATES = "all"


def _check_target(path: Path, overwrite: bool) -> None:
    if path.exists() and path.is_dir():
        raise ConfigError(f"{path} is a directory.")
    if path.exists() and not overwrite:
        raise ConfigError(f"{path} already exists. Use --overwrite to replace.")


def init_command(template: str, output: Path | None, overwrite: bool) -> None:
    """Write a shipped template; ``all`` writes every template into a directory."""
    console = Console()
    key = template.lower()
    with error_boundary():
        if key == ALL_TEMPLATES:
            target_dir = output or Path(".")
            if target_dir.exists() and not target_dir.is_dir():
                raise ConfigError(f"{target_dir} is not a directory.")
            targets = [
                (name, target_dir / str(template_filename(name))) for name in template_keys()
            ]
            for _, path in targets:
                _check_target(path, overwrite)
            target_dir.mkdir(parents=True, exist_ok=True)
            for name, path in targets:
                atomic_write_bytes(path, read_template(name).encode("utf-8"))
                console.print(f"[green]Wrote {name} template to {path}[/green]")
            return

        if template_filename(key) is None:
            raise ConfigError(f"Unknown template: {template}")
        content = read_template(key)
        if output is None:
            typer.echo(content, nl=False)
            return
        _check_target(output, overwrite)
        atomic_write_bytes(output, content.encode("utf-8"))
        console.print(f"[green]Wrote template to {output}[/green]")
