from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from time import perf_counter

import numpy as np

from quake.core.coverage import build_pairwise_universe
from quake.core.global_search import global_search
from quake.core.models.context import ContextSchema, EpConfig
from quake.core.models.policy import Variant
from quake.core.models.search import SearchConfig
from quake.core.mutation import generate_mutants, run_experiment
from quake.core.policy_parser import parse_policy
from quake.templates.registry import read_template


@dataclass(frozen=True)
class PerfResult:
    universe_seconds: float
    search_seconds: float
    experiment_seconds: float
    pairs: int
    flows: int
    mutants: int


def run_harness(
    flow_length: int = 20,
    hard_limit: int = 20,
    local_iterations: int = 50,
    jobs: int = 1,
) -> PerfResult:
    """Time the three heavy stages on the shipped web-server model."""
    schema = ContextSchema.model_validate_json(read_template("schema"))
    policy = parse_policy(read_template("policy"), schema.names)
    cfg = SearchConfig(
        flow_length=flow_length,
        hard_limit=hard_limit,
        stale_limit=min(hard_limit, 100),
        local_iterations=local_iterations,
        ep=schema.ep or EpConfig(),
    )

    universe_start = perf_counter()
    universe = build_pairwise_universe(schema, schema.coverage_samples)
    universe_end = perf_counter()

    search_start = perf_counter()
    result = global_search(schema, universe, cfg, np.random.default_rng(cfg.seed))
    search_end = perf_counter()

    experiment_start = perf_counter()
    mutants = generate_mutants(policy, schema)
    run_experiment(schema, policy, None, mutants, {"perf": result.solution}, Variant(), jobs=jobs)
    experiment_end = perf_counter()

    return PerfResult(
        universe_seconds=universe_end - universe_start,
        search_seconds=search_end - search_start,
        experiment_seconds=experiment_end - experiment_start,
        pairs=len(universe.pairs),
        flows=len(result.solution),
        mutants=len(mutants),
    )


def _format_result(result: PerfResult) -> str:
    return (
        f"pairs: {result.pairs}\n"
        f"flows: {result.flows}\n"
        f"mutants: {result.mutants}\n"
        f"universe_seconds: {result.universe_seconds:.4f}\n"
        f"search_seconds: {result.search_seconds:.4f}\n"
        f"experiment_seconds: {result.experiment_seconds:.4f}\n"
    )


def main(argv: Sequence[str] | None = None) -> int:
    import argparse

    parser = argparse.ArgumentParser(description="quake performance harness")
    parser.add_argument("--flow-length", type=int, default=20)
    parser.add_argument("--hard-limit", type=int, default=20)
    parser.add_argument("--local-iterations", type=int, default=50)
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args(argv)

    result = run_harness(args.flow_length, args.hard_limit, args.local_iterations, args.jobs)
    print(_format_result(result))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
