"""E2E fixtures: a project directory laid out by ``quake init``."""

from __future__ import annotations

from pathlib import Path

import pytest
from typer.testing import CliRunner

from quake.cli.app import app

PROJECT_CONFIG = """\
schema: web_server.json
policy: web_server.policy
search:
  flow_length: 8
  hard_limit: 5
  stale_limit: 3
  local_iterations: 15
  neighborhood: 5
  seed: 3
mutation_plan:
  F1: 1
  F2: 2
  F3: 2
  F4: 1
"""


@pytest.fixture
def cli_runner() -> CliRunner:
    """Typer CliRunner for invoking commands."""
    return CliRunner()


@pytest.fixture
def project(tmp_path: Path, cli_runner: CliRunner) -> Path:
    """Shipped templates written by ``init`` plus a config with small budgets."""
    root = tmp_path / "project"
    result = cli_runner.invoke(app, ["init", "--output", str(root)])
    assert result.exit_code == 0, result.output
    (root / "quake.yaml").write_text(PROJECT_CONFIG, encoding="utf-8")
    return root
