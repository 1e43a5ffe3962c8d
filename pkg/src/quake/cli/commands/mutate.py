from __future__ import annotations

from pathlib import Path

import msgspec
import structlog
from rich.console import Console

from quake.adapters.loaders.plan_loader import load_plan
from quake.adapters.reporters.base import ReporterBase
from quake.adapters.reporters.csv import CsvReporter, SuiteKillsCsvReporter
from quake.adapters.reporters.json import JsonReporter
from quake.adapters.reporters.text import TextReporter
from quake.adapters.storage.suite_store import SuiteStore
from quake.cli.commands.common import error_boundary, prepare_output, resolve_inputs, write_manifest
from quake.cli.ui.tables import render_mutation_summary
from quake.core.models.mutation import MutationPlan
from quake.core.mutation import (
    CONTROL_ID,
    MUTANTS_FILE,
    build_report,
    generate_mutants,
    run_experiment,
)
from quake.core.utils import atomic_write_bytes, file_digests
from quake.errors import ConfigError
from quake.logging import bind_run

log: structlog.stdlib.BoundLogger = structlog.get_logger(__name__)

REPORT_STEM = "mutation_report"
MATRIX_STEM = "kill_matrix"
SUITE_KILLS_STEM = "suite_kills"


def mutate_command(
    suites: list[Path],
    config_path: Path | None,
    schema_path: Path | None,
    policy_path: Path | None,
    plan: str | None,
    initial: str | None,
    jobs: int,
    with_control: bool,
    out_dir: Path,
) -> None:
    console = Console()
    with error_boundary():
        bind_run("mutate", jobs=jobs)
        inputs = resolve_inputs(config_path, schema_path)
        schema = inputs.schema
        policy = inputs.policy(policy_path)
        start = inputs.initial_variant(initial)

        chosen = load_plan(plan) if plan else inputs.config.mutation_plan
        if plan and Path(plan).is_file():
            inputs.digests.update(file_digests([Path(plan)]))
        if isinstance(chosen, MutationPlan):
            if with_control:
                chosen = chosen.model_copy(update={"control": True})
            mutants = generate_mutants(policy, schema, chosen)
        else:
            mutants = list(chosen)

        names = [suite.name for suite in suites]
        if len(set(names)) != len(names):
            raise ConfigError("suite directories must have distinct names")
        aeq_suites = {suite.name: SuiteStore(suite, schema).load() for suite in suites}
        inputs.digests.update(file_digests(suites))

        matrix = run_experiment(
            schema,
            policy,
            inputs.config.fuzzy_sets,
            mutants,
            aeq_suites,
            start,
            jobs=jobs,
        )
        report = build_report(matrix)

        prepare_output(out_dir)
        reporters: list[tuple[str, ReporterBase]] = [
            (MATRIX_STEM, CsvReporter()),
            (SUITE_KILLS_STEM, SuiteKillsCsvReporter()),
            (REPORT_STEM, JsonReporter()),
            (REPORT_STEM, TextReporter()),
        ]
        outputs: list[Path] = []
        for stem, reporter in reporters:
            path = out_dir / f"{stem}.{reporter.file_extension}"
            atomic_write_bytes(path, reporter.generate(matrix, report))
            outputs.append(path)
        mutants_path = out_dir / MUTANTS_FILE
        encoded = msgspec.json.format(msgspec.json.encode(mutants), indent=2)
        atomic_write_bytes(mutants_path, encoded)
        outputs.append(mutants_path)
        write_manifest(
            out_dir,
            "mutate",
            inputs,
            outputs,
            seed=None,
            settings={
                "suites": names,
                "mutants": len(mutants),
                "control": any(m.id == CONTROL_ID for m in mutants),
                "plan": plan or "config",
                "initial_variant": msgspec.to_builtins(start),
            },
        )
        log.info("experiment_written", out_dir=str(out_dir), mutants=report.mutants)
    render_mutation_summary(report, console)
