"""CLI app with deferred heavy imports."""

from pathlib import Path

import typer

app = typer.Typer(
    name="quake",
    help="quake - artificial earthquakes for testing adaptive systems",
    no_args_is_help=True,
    add_completion=False,
)

_CONFIG_HELP = "YAML run configuration"
_SCHEMA_HELP = "Context schema JSON (overrides the config file)"
_POLICY_HELP = "Adaptation policy file (overrides the config file)"
_RHO_HELP = "Ratio between the larger and smaller step of a violent window"
_EPSILON_HELP = "Smallest normalized step that counts as violent"
_WINDOW_HELP = "Most transitions an EP window may span"


def _setup_logging(verbose: bool, log_json: bool) -> None:
    from quake.logging import configure_logging

    configure_logging(verbose=verbose, json_logs=log_json)


@app.command()
def generate(
    config: Path | None = typer.Option(
        None,
        "--config",
        "-c",
        exists=True,
        readable=True,
        help=_CONFIG_HELP,
    ),
    schema: Path | None = typer.Option(
        None,
        "--schema",
        exists=True,
        readable=True,
        help=_SCHEMA_HELP,
    ),
    out: Path = typer.Option(Path("./aeq-suite"), "--out", "-o", help="Output directory"),
    seed: int | None = typer.Option(None, "--seed", help="Override the search seed"),
    rounds: int | None = typer.Option(None, "--rounds", min=1, help="Independent global searches"),
    trace: bool = typer.Option(False, "--trace", help="Write the search iteration trace"),
    rho: float | None = typer.Option(None, "--rho", help=_RHO_HELP),
    epsilon: float | None = typer.Option(None, "--epsilon", help=_EPSILON_HELP),
    window_max: int | None = typer.Option(None, "--window-max", help=_WINDOW_HELP),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Enable verbose logging"),
    log_json: bool = typer.Option(False, "--log-json", help="Emit logs as JSON lines"),
) -> None:
    """Generate a suite of artificial earthquakes."""
    from quake.cli.commands.generate import generate_command

    _setup_logging(verbose, log_json)
    generate_command(
        config_path=config,
        schema_path=schema,
        out_dir=out,
        seed=seed,
        rounds=rounds,
        trace=trace,
        ep_overrides={"rho": rho, "epsilon": epsilon, "window_max": window_max},
    )


@app.command()
def profile(
    flow: Path = typer.Argument(..., exists=True, readable=True, dir_okay=False),
    config: Path | None = typer.Option(
        None,
        "--config",
        "-c",
        exists=True,
        readable=True,
        help=_CONFIG_HELP,
    ),
    schema: Path | None = typer.Option(
        None,
        "--schema",
        exists=True,
        readable=True,
        help=_SCHEMA_HELP,
    ),
    out: Path = typer.Option(Path("./profiles"), "--out", "-o", help="Output directory"),
    rho: float | None = typer.Option(None, "--rho", help=_RHO_HELP),
    epsilon: float | None = typer.Option(None, "--epsilon", help=_EPSILON_HELP),
    window_max: int | None = typer.Option(None, "--window-max", help=_WINDOW_HELP),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Enable verbose logging"),
    log_json: bool = typer.Option(False, "--log-json", help="Emit logs as JSON lines"),
) -> None:
    """Detect earthquake profiles and export distance series for plotting."""
    from quake.cli.commands.profile import profile_command

    _setup_logging(verbose, log_json)
    profile_command(
        flow_path=flow,
        config_path=config,
        schema_path=schema,
        out_dir=out,
        ep_overrides={"rho": rho, "epsilon": epsilon, "window_max": window_max},
    )


@app.command()
def simulate(
    flow: Path = typer.Argument(..., exists=True, readable=True, dir_okay=False),
    config: Path | None = typer.Option(
        None,
        "--config",
        "-c",
        exists=True,
        readable=True,
        help=_CONFIG_HELP,
    ),
    schema: Path | None = typer.Option(
        None,
        "--schema",
        exists=True,
        readable=True,
        help=_SCHEMA_HELP,
    ),
    policy: Path | None = typer.Option(
        None,
        "--policy",
        "-p",
        exists=True,
        readable=True,
        help=_POLICY_HELP,
    ),
    initial: str | None = typer.Option(
        None,
        "--initial",
        help="Initial variant as cache_exists,cache_size,cache_validity_s,data_servers",
    ),
    out: Path = typer.Option(Path("./traces"), "--out", "-o", help="Output directory"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Enable verbose logging"),
    log_json: bool = typer.Option(False, "--log-json", help="Emit logs as JSON lines"),
) -> None:
    """Run the simulated web server over each flow and write its reconfiguration trace."""
    from quake.cli.commands.simulate import simulate_command

    _setup_logging(verbose, log_json)
    simulate_command(
        flow_path=flow,
        config_path=config,
        schema_path=schema,
        policy_path=policy,
        initial=initial,
        out_dir=out,
    )


@app.command()
def mutate(
    suites: list[Path] = typer.Argument(
        ...,
        exists=True,
        file_okay=False,
        help="AEQ suite directories",
    ),
    config: Path | None = typer.Option(
        None,
        "--config",
        "-c",
        exists=True,
        readable=True,
        help=_CONFIG_HELP,
    ),
    schema: Path | None = typer.Option(
        None,
        "--schema",
        exists=True,
        readable=True,
        help=_SCHEMA_HELP,
    ),
    policy: Path | None = typer.Option(
        None,
        "--policy",
        "-p",
        exists=True,
        readable=True,
        help=_POLICY_HELP,
    ),
    plan: str | None = typer.Option(
        None,
        "--plan",
        help="Mutant plan: 'default', 'exhaustive-small' or a JSON plan file",
    ),
    initial: str | None = typer.Option(None, "--initial", help="Initial variant"),
    jobs: int = typer.Option(1, "--jobs", "-j", min=1, help="Worker processes"),
    with_control: bool = typer.Option(False, "--with-control", help="Add the identity mutant"),
    out: Path = typer.Option(Path("./mutation"), "--out", "-o", help="Output directory"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Enable verbose logging"),
    log_json: bool = typer.Option(False, "--log-json", help="Emit logs as JSON lines"),
) -> None:
    """Run the mutation experiment of policy mutants against AEQ suites."""
    from quake.cli.commands.mutate import mutate_command

    _setup_logging(verbose, log_json)
    mutate_command(
        suites=suites,
        config_path=config,
        schema_path=schema,
        policy_path=policy,
        plan=plan,
        initial=initial,
        jobs=jobs,
        with_control=with_control,
        out_dir=out,
    )


@app.command()
def report(
    matrix: Path = typer.Argument(..., exists=True, readable=True, dir_okay=False),
    format: str = typer.Option("text", "--format", "-f", help="text, csv, suite-csv or json"),
    output: Path | None = typer.Option(None, "--output", "-o"),
    overwrite: bool = typer.Option(False, "--overwrite"),
    majority: float = typer.Option(0.6, "--majority", help="Majority bucket threshold"),
    template: Path | None = typer.Option(
        None,
        "--template",
        exists=True,
        readable=True,
        help="Custom Jinja2 template for text reports",
    ),
) -> None:
    """Re-render a saved kill matrix."""
    from quake.cli.commands.report import report_command

    report_command(
        report_path=matrix,
        format=format,
        output_path=output,
        overwrite=overwrite,
        majority=majority,
        template_path=template,
    )


@app.command()
def validate(
    schema: Path | None = typer.Option(None, "--schema", exists=True, readable=True),
    config: Path | None = typer.Option(None, "--config", "-c", exists=True, readable=True),
    policy: Path | None = typer.Option(None, "--policy", "-p", exists=True, readable=True),
    run: Path | None = typer.Option(
        None, "--run", exists=True, file_okay=False, help="Output directory of an earlier command"
    ),
) -> None:
    """Validate schema, config and policy files, or the outputs of a run."""
    from quake.cli.commands.validate import validate_command

    validate_command(schema_path=schema, config_path=config, policy_path=policy, run_path=run)


@app.command()
def init(
    template: str = typer.Option("all", "--template", "-t", help="schema, policy, config or all"),
    output: Path | None = typer.Option(None, "--output", "-o"),
    overwrite: bool = typer.Option(False, "--overwrite"),
) -> None:
    """Write the shipped web-server schema, policy and config."""
    from quake.cli.commands.init import init_command

    init_command(template=template, output=output, overwrite=overwrite)


@app.command("templates")
def list_templates() -> None:
    from quake.cli.commands.templates import templates_command

    templates_command()
