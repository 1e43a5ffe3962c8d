from __future__ import annotations

from collections import Counter
from collections.abc import Sequence

from rich.console import Console
from rich.table import Table

from quake.adapters.reporters.profile import ProfileSummary
from quake.core.models.enums import SearchAction
from quake.core.models.mutation import MutationReport
from quake.core.models.policy import VariantFlow
from quake.core.models.search import SearchResult


def render_search_summary(
    result: SearchResult,
    console: Console,
    flow_space: tuple[float, int] | None = None,
) -> None:
    table = Table(title="AEQ Suite")
    table.add_column("Flow")
    table.add_column("L", justify="right")
    table.add_column("EP", justify="right")
    table.add_column("Shape")
    table.add_column("Pairs", justify="right")
    for summary in result.per_flow:
        table.add_row(
            summary.flow_id,
            f"{summary.l_value:.4f}",
            f"{summary.ep_count:g}",
            summary.shape.value,
            str(summary.pairs_covered),
        )
    console.print(table)
    actions = Counter(event.action for event in result.trace or ())
    decisions = ", ".join(f"{action.value} {actions.get(action, 0)}" for action in SearchAction)
    iterations = str(result.iterations_used)
    if len(result.round_iterations) > 1:
        iterations += " (" + " + ".join(map(str, result.round_iterations)) + ")"
    console.print(
        f"G = {result.g_value:.4f}  coverage {result.pairs_covered}/{result.universe_size} "
        f"({result.coverage_ratio:.1%})  iterations {iterations}  [{decisions}]"
    )
    if flow_space is not None:
        mantissa, exponent = flow_space
        console.print(f"flow space ~ {mantissa:.3f}e{exponent} ordered flows")


def render_profiles(summaries: Sequence[ProfileSummary], console: Console) -> None:
    table = Table(title="Earthquake Profiles")
    table.add_column("Flow")
    table.add_column("Length", justify="right")
    table.add_column("EP", justify="right")
    table.add_column("Shape")
    table.add_column("Oscillation")
    for summary in summaries:
        table.add_row(
            summary.flow_id,
            str(summary.length),
            f"{summary.ep_count:g}",
            summary.shape.value,
            "yes" if summary.oscillation_satisfied else "no",
        )
    console.print(table)


def render_traces(traces: Sequence[VariantFlow], console: Console) -> None:
    table = Table(title="Reconfiguration Traces")
    table.add_column("Flow")
    table.add_column("Steps", justify="right")
    table.add_column("Adaptations", justify="right")
    table.add_column("Final variant")
    for trace in traces:
        fired = sum(1 for step in trace.steps if step.actions)
        final = trace.steps[-1].variant
        table.add_row(
            trace.flow_id,
            str(len(trace)),
            str(fired),
            f"cache={final.cache_exists} size={final.cache_size} "
            f"validity={final.cache_validity_s}s servers={final.data_servers}",
        )
    console.print(table)


def render_mutation_summary(report: MutationReport, console: Console) -> None:
    table = Table(title="Mutation Summary")
    table.add_column("Group")
    table.add_column("Mutants", justify="right")
    table.add_column("Killed", justify="right")
    table.add_column("Score", justify="right")
    table.add_column("Mean kill fraction", justify="right")
    for group in report.groups:
        table.add_row(
            group.group.value,
            str(group.mutants),
            str(group.killed),
            f"{group.kill_score:.1%}",
            f"{group.mean_kill_fraction:.1%}",
        )
    table.add_row(
        "total",
        str(report.mutants),
        str(report.killed),
        f"{report.raw_kill_score:.1%}",
        "",
        style="bold",
    )
    console.print(table)
    console.print(
        f"killed by every AEQ: {report.killed_by_all} "
        f"({report.killed_by_all_fraction:.1%}); killed by more than "
        f"{report.majority_threshold:.0%} of AEQs: {report.killed_by_majority} "
        f"({report.killed_by_majority_fraction:.1%}); simulations: {report.simulations}"
    )
    if report.survivors:
        console.print(
            "[yellow]possibly equivalent: "
            + ", ".join(survivor.mutant_id for survivor in report.survivors)
            + "[/yellow]"
        )
    if report.errored:
        console.print("[red]failed on every AEQ: " + ", ".join(report.errored) + "[/red]")
