from __future__ import annotations

from pathlib import Path

from rich.console import Console

from quake.adapters.reporters.profile import encode_profile, summarize_profile
from quake.adapters.storage.flow_store import FlowCsvStore
from quake.adapters.storage.suite_store import encode_profile as encode_plot_data
from quake.cli.commands.common import (
    EpOverrides,
    error_boundary,
    prepare_output,
    resolve_inputs,
    write_manifest,
)
from quake.cli.ui.tables import render_profiles
from quake.core.metric import detect_ep
from quake.core.models.context import EpConfig
from quake.core.utils import atomic_write_bytes, file_digests
from quake.logging import bind_run


def profile_command(
    flow_path: Path,
    config_path: Path | None,
    schema_path: Path | None,
    out_dir: Path,
    ep_overrides: EpOverrides | None = None,
) -> None:
    console = Console()
    with error_boundary():
        bind_run("profile")
        inputs = resolve_inputs(config_path, schema_path, ep_overrides)
        schema = inputs.schema
        ep_config = schema.ep or EpConfig()
        flows = FlowCsvStore(schema).load(flow_path)
        inputs.digests.update(file_digests([flow_path]))
        reports = [(flow, detect_ep(schema, flow, ep_config)) for flow in flows]

        prepare_output(out_dir)
        outputs: list[Path] = []
        summaries = []
        for flow, report in reports:
            summary = summarize_profile(flow.id, report)
            summaries.append(summary)
            json_path = out_dir / f"{flow.id}.profile.json"
            csv_path = out_dir / f"{flow.id}.profile.csv"
            atomic_write_bytes(json_path, encode_profile(summary))
            atomic_write_bytes(csv_path, encode_plot_data(report.origin_distance_series))
            outputs += [json_path, csv_path]
        write_manifest(
            out_dir,
            "profile",
            inputs,
            outputs,
            seed=None,
            settings={"ep": ep_config.model_dump(mode="json")},
        )
    render_profiles(summaries, console)
