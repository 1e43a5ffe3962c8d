from __future__ import annotations

from pathlib import Path

import msgspec
from rich.console import Console

from quake.adapters.storage.flow_store import FlowCsvStore
from quake.adapters.storage.trace_store import save_variant_trace
from quake.cli.commands.common import error_boundary, prepare_output, resolve_inputs, write_manifest
from quake.cli.ui.tables import render_traces
from quake.core.fuzzy import Fuzzifier
from quake.core.simulator import run
from quake.core.utils import file_digests
from quake.logging import bind_run


def simulate_command(
    flow_path: Path,
    config_path: Path | None,
    schema_path: Path | None,
    policy_path: Path | None,
    initial: str | None,
    out_dir: Path,
) -> None:
    console = Console()
    with error_boundary():
        bind_run("simulate")
        inputs = resolve_inputs(config_path, schema_path)
        schema = inputs.schema
        policy = inputs.policy(policy_path)
        start = inputs.initial_variant(initial)
        flows = FlowCsvStore(schema).load(flow_path)
        inputs.digests.update(file_digests([flow_path]))

        fuzzifier = Fuzzifier(schema, inputs.config.fuzzy_sets)
        traces = [run(policy, fuzzifier, start, flow) for flow in flows]

        prepare_output(out_dir)
        outputs = [
            save_variant_trace(trace, out_dir / f"{trace.flow_id}.trace.jsonl") for trace in traces
        ]
        write_manifest(
            out_dir,
            "simulate",
            inputs,
            outputs,
            seed=None,
            settings={
                "initial_variant": msgspec.to_builtins(start),
                "rules": len(policy.rules),
                "utility_threshold": policy.utility_threshold,
            },
        )
    render_traces(traces, console)
