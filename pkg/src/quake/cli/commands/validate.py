from __future__ import annotations

from pathlib import Path

import typer
from rich.console import Console

from quake.adapters.loaders.json_schema_loader import JsonSchemaLoader
from quake.adapters.loaders.policy_loader import load_policy
from quake.adapters.loaders.yaml_config_loader import YamlConfigLoader
from quake.adapters.storage.run_check import check_run
from quake.cli.commands.common import error_boundary
from quake.core.validator import ValidationIssue


def _print_issues(console: Console, label: str, issues: list[ValidationIssue]) -> None:
    console.print(f"[red]{label} validation failed:[/red]")
    for issue in issues:
        console.print(f"- {issue.path or label.lower()}: {issue.message}")


def validate_command(
    schema_path: Path | None,
    config_path: Path | None,
    policy_path: Path | None,
    run_path: Path | None = None,
) -> None:
    """Check input files without running anything; parse errors keep their exit code."""
    console = Console()
    if all(path is None for path in (schema_path, config_path, policy_path, run_path)):
        console.print(
            "[red]Nothing to validate. Pass --schema, --config, --policy or --run.[/red]"
        )
        raise typer.Exit(code=2)
    with error_boundary():
        failed = False
        names = None
        if schema_path is not None:
            issues = JsonSchemaLoader().validate(schema_path)
            if issues:
                _print_issues(console, "Schema", issues)
                failed = True
            else:
                names = JsonSchemaLoader().load(schema_path).names
                console.print(f"[green]Schema {schema_path} is valid.[/green]")
        if config_path is not None:
            issues = YamlConfigLoader().validate(config_path)
            if issues:
                _print_issues(console, "Config", issues)
                failed = True
            else:
                console.print(f"[green]Config {config_path} is valid.[/green]")
        if policy_path is not None:
            policy = load_policy(policy_path, names) if names else load_policy(policy_path)
            console.print(
                f"[green]Policy {policy_path} is valid ({len(policy.rules)} rules).[/green]"
            )
        if run_path is not None:
            check = check_run(run_path)
            console.print(
                f"[green]Run {run_path} ({check.manifest.command}) is valid: "
                f"{len(check.checked)} outputs, {check.flows} flows, {check.steps} steps.[/green]"
            )
        if failed:
            raise typer.Exit(code=2)
