from __future__ import annotations

import csv
import io
import json
import shutil

import msgspec
from typer.testing import CliRunner

from quake.adapters.reporters.json import decode_matrix
from quake.cli.app import app
from quake.core.models.mutation import MutantSpec
from quake.core.mutation import CONTROL_ID, build_report


def _mutate(*args):
    return CliRunner().invoke(app, ["mutate", *args])


def test_mutate_writes_matrix_and_reports(run_dir, suite_dir):
    out = run_dir / "mutation"

    result = _mutate(str(suite_dir), "-c", str(run_dir / "quake.yaml"), "-o", str(out))

    assert result.exit_code == 0, result.output
    for name in (
        "kill_matrix.csv",
        "suite_kills.csv",
        "mutation_report.json",
        "mutation_report.txt",
        "mutants.json",
        "manifest.json",
    ):
        assert (out / name).is_file()
    matrix = decode_matrix((out / "mutation_report.json").read_bytes())
    assert len(matrix.rows) == 8
    assert matrix.aeq_ids == ("suite1/scenario", "suite1/ramp")
    rows = list(csv.reader(io.StringIO((out / "kill_matrix.csv").read_text(encoding="utf-8"))))
    assert len(rows) == 1 + 8 * 2
    assert "Mutation Summary" in result.output


def test_mutate_averages_kills_across_suites(run_dir, suite_dir):
    second = run_dir / "suite2"
    shutil.copytree(suite_dir, second)
    out = run_dir / "mutation"

    result = _mutate(
        str(suite_dir), str(second), "-c", str(run_dir / "quake.yaml"), "-o", str(out)
    )

    assert result.exit_code == 0, result.output
    rows = list(csv.reader(io.StringIO((out / "suite_kills.csv").read_text(encoding="utf-8"))))
    assert rows[0] == ["mutant_id", "group", "suite1", "suite2", "mean_kills"]
    assert len(rows) == 1 + 8
    for row in rows[1:]:
        assert row[2] == row[3]
        assert float(row[4]) == int(row[2])
    text = (out / "mutation_report.txt").read_text(encoding="utf-8")
    assert "Kills per suite (suite1, suite2)" in text


def test_saved_report_matches_the_matrix(run_dir, suite_dir):
    out = run_dir / "mutation"
    _mutate(str(suite_dir), "-c", str(run_dir / "quake.yaml"), "-o", str(out))

    data = (out / "mutation_report.json").read_bytes()
    saved = json.loads(data)["report"]

    assert saved == msgspec.to_builtins(build_report(decode_matrix(data)))


def test_mutate_with_control_and_a_named_plan(run_dir, suite_dir):
    out = run_dir / "mutation"

    result = _mutate(
        str(suite_dir), "--plan", "default", "--with-control", "-o", str(out)
    )

    assert result.exit_code == 0, result.output
    mutants = msgspec.json.decode((out / "mutants.json").read_bytes(), type=list[MutantSpec])
    assert len(mutants) == 46
    assert mutants[0].id == CONTROL_ID
    report = json.loads((out / "mutation_report.json").read_bytes())["report"]
    assert report["mutants"] == 45
    assert CONTROL_ID in report["possibly_equivalent"]
    assert CONTROL_ID not in [s["mutant_id"] for s in report["survivors"]]


def test_mutate_with_a_plan_file(run_dir, suite_dir):
    plan = run_dir / "plan.json"
    plan.write_text('{"F1": "all"}', encoding="utf-8")
    out = run_dir / "mutation"

    result = _mutate(str(suite_dir), "--plan", str(plan), "-o", str(out))

    assert result.exit_code == 0, result.output
    report = json.loads((out / "mutation_report.json").read_bytes())["report"]
    assert report["mutants"] == 9
    assert report["simulations"] == (9 + 1) * 2


def test_parallel_jobs_give_the_same_matrix(run_dir, suite_dir):
    config = str(run_dir / "quake.yaml")
    _mutate(str(suite_dir), "-c", config, "-o", str(run_dir / "one"))
    result = _mutate(str(suite_dir), "-c", config, "-j", "2", "-o", str(run_dir / "two"))

    assert result.exit_code == 0, result.output
    assert (run_dir / "one" / "kill_matrix.csv").read_bytes() == (
        run_dir / "two" / "kill_matrix.csv"
    ).read_bytes()


def test_suite_names_must_be_distinct(tmp_path, suite_dir):
    twin = tmp_path / "other" / suite_dir.name
    twin.mkdir(parents=True)
    (twin / "flows.csv").write_bytes((suite_dir / "flows.csv").read_bytes())

    result = _mutate(str(suite_dir), str(twin), "-o", str(tmp_path / "out"))

    assert result.exit_code == 2
    assert "distinct names" in result.output


def test_oversized_plan_exits_with_2(suite_dir, tmp_path):
    plan = tmp_path / "plan.json"
    plan.write_text('{"F1": 50}', encoding="utf-8")

    result = _mutate(str(suite_dir), "--plan", str(plan), "-o", str(tmp_path / "out"))

    assert result.exit_code == 2
    assert "at most 9" in result.output


def test_empty_suite_directory_exits_with_2(tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()

    result = _mutate(str(empty), "-o", str(tmp_path / "out"))

    assert result.exit_code == 2
    assert "holds" in result.output
