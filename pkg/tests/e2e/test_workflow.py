"""E2E tests for the generate, profile, simulate, mutate and report workflow."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import msgspec
import pytest
from typer.testing import CliRunner

from quake.adapters.reporters.profile import ProfileSummary
from quake.adapters.storage.flow_store import FlowCsvStore
from quake.adapters.storage.suite_store import SuiteStore
from quake.adapters.storage.trace_store import load_variant_trace
from quake.cli.app import app
from quake.core.fuzzy import Fuzzifier
from quake.core.models.context import ContextSchema
from quake.core.models.manifest import decode_manifest
from quake.core.models.policy import Variant
from quake.core.policy_parser import parse_policy
from quake.core.simulator import run
from quake.templates.registry import read_template

WEB = ContextSchema.model_validate_json(read_template("schema"))


def _invoke(runner: CliRunner, *args: str) -> None:
    result = runner.invoke(app, list(args))
    assert result.exit_code == 0, result.output


@pytest.mark.e2e
class TestFullWorkflow:
    """A generated suite flows through every downstream command."""

    def test_suite_to_report(self, project: Path, cli_runner: CliRunner) -> None:
        config = str(project / "quake.yaml")
        suite = project / "suite"

        _invoke(cli_runner, "generate", "-c", config, "-o", str(suite), "--trace")
        flows = SuiteStore(suite, WEB).load()
        first = suite / "flows" / f"{flows[0].id}.csv"

        _invoke(cli_runner, "profile", str(first), "-c", config, "-o", str(project / "profiles"))
        profile = msgspec.json.decode(
            (project / "profiles" / f"{flows[0].id}.profile.json").read_bytes(),
            type=ProfileSummary,
        )
        assert profile.length == 8

        _invoke(cli_runner, "simulate", str(first), "-c", config, "-o", str(project / "traces"))
        trace = load_variant_trace(project / "traces" / f"{flows[0].id}.trace.jsonl")
        (flow,) = FlowCsvStore(WEB).load(first)
        policy = parse_policy(read_template("policy"), WEB.names)
        assert trace == run(policy, Fuzzifier(WEB), Variant(), flow)

        mutation = project / "mutation"
        _invoke(
            cli_runner, "mutate", str(suite), "-c", config, "-o", str(mutation), "--with-control"
        )
        report = json.loads((mutation / "mutation_report.json").read_bytes())["report"]
        assert report["mutants"] == 6
        assert report["aeqs"] == len(flows)

        target = project / "matrix.csv"
        _invoke(
            cli_runner,
            "report",
            str(mutation / "mutation_report.json"),
            "-f",
            "csv",
            "-o",
            str(target),
        )
        rows = list(csv.reader(io.StringIO(target.read_text(encoding="utf-8"))))
        assert len(rows) == 1 + 7 * len(flows)
        assert target.read_bytes() == (mutation / "kill_matrix.csv").read_bytes()

    def test_manifests_chain_the_inputs(self, project: Path, cli_runner: CliRunner) -> None:
        config = str(project / "quake.yaml")
        suite = project / "suite"
        _invoke(cli_runner, "generate", "-c", config, "-o", str(suite))
        _invoke(cli_runner, "mutate", str(suite), "-c", config, "-o", str(project / "mutation"))

        manifest = decode_manifest((project / "mutation" / "manifest.json").read_bytes())

        assert manifest.command == "mutate"
        assert str((project / "web_server.policy").resolve()) in manifest.inputs
        assert any(name.endswith(".csv") for name in manifest.inputs)
        assert "kill_matrix.csv" in manifest.outputs
        assert manifest.config["suites"] == ["suite"]
        assert manifest.config["control"] is False

    def test_same_seed_same_suite(self, project: Path, cli_runner: CliRunner) -> None:
        config = str(project / "quake.yaml")
        _invoke(cli_runner, "generate", "-c", config, "-o", str(project / "a"))
        _invoke(cli_runner, "generate", "-c", config, "-o", str(project / "b"))

        assert SuiteStore(project / "a", WEB).load() == SuiteStore(project / "b", WEB).load()
