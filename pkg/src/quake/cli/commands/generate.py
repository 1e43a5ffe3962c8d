from __future__ import annotations

from pathlib import Path

import structlog
from rich.console import Console

from quake.adapters.storage.suite_store import SuiteStore
from quake.cli.commands.common import (
    EpOverrides,
    error_boundary,
    prepare_output,
    resolve_inputs,
    write_manifest,
)
from quake.cli.ui.tables import render_search_summary
from quake.core.context import flow_space_size, space_magnitude
from quake.core.coverage import build_pairwise_universe, mark_covered
from quake.core.global_search import generate_suite
from quake.logging import bind_run

log: structlog.stdlib.BoundLogger = structlog.get_logger(__name__)


def generate_command(
    config_path: Path | None,
    schema_path: Path | None,
    out_dir: Path,
    seed: int | None,
    rounds: int | None,
    trace: bool,
    ep_overrides: EpOverrides | None = None,
) -> None:
    console = Console()
    with error_boundary():
        inputs = resolve_inputs(config_path, schema_path, ep_overrides)
        schema = inputs.schema
        cfg = inputs.config.search_config(schema, seed=seed, rounds=rounds)
        bind_run("generate", seed=cfg.seed)
        flow_space = space_magnitude(flow_space_size(schema, cfg.flow_length))
        universe = build_pairwise_universe(schema, schema.coverage_samples)
        result = generate_suite(
            schema,
            universe,
            cfg,
            distribution=inputs.config.reality_distribution(),
        )
        prepare_output(out_dir)
        store = SuiteStore(out_dir, schema)
        outputs = store.save(result, mark_covered(universe, result.solution), with_trace=trace)
        write_manifest(
            out_dir,
            "generate",
            inputs,
            outputs,
            seed=cfg.seed,
            settings={
                "search": cfg.model_dump(mode="json"),
                "schema": schema.model_dump(mode="json"),
                "flow_space": {"mantissa": flow_space[0], "exponent": flow_space[1]},
            },
        )
        log.info("suite_written", out_dir=str(out_dir), flows=len(result.solution))
    render_search_summary(result, console, flow_space)
