from __future__ import annotations

from rich.console import Console

from quake.templates.registry import template_filename, template_keys


def templates_command() -> None:
    console = Console()
    console.print("[bold]Available templates:[/bold]")
    for name in template_keys():
        console.print(f"- {name} ({template_filename(name)})")
