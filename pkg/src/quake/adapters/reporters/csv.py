from __future__ import annotations

import csv
import io

from quake.adapters.reporters.base import ReporterBase
from quake.core.models.mutation import KillMatrix, MutationReport

MATRIX_HEADER = ("mutant_id", "group", "aeq_id", "killed", "divergence_step")


class CsvReporter(ReporterBase):
    """One row per (mutant, AEQ) cell."""

    content_type = "text/csv"
    file_extension = "csv"

    def generate(self, matrix: KillMatrix, report: MutationReport) -> bytes:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(MATRIX_HEADER)
        for row in matrix.rows:
            for cell in row.cells:
                writer.writerow(
                    [
                        cell.mutant_id,
                        row.mutant.group or "",
                        cell.aeq_id,
                        int(cell.killed),
                        "" if cell.divergence_step is None else cell.divergence_step,
                    ]
                )
        return buffer.getvalue().encode("utf-8")


class SuiteKillsCsvReporter(ReporterBase):
    """One row per mutant: kills in each suite and their mean across suites."""

    content_type = "text/csv"
    file_extension = "csv"

    def generate(self, matrix: KillMatrix, report: MutationReport) -> bytes:
        groups = {row.mutant.id: row.mutant.group or "" for row in matrix.rows}
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["mutant_id", "group", *report.suites, "mean_kills"])
        for stats in report.suite_kills:
            writer.writerow(
                [stats.mutant_id, groups[stats.mutant_id], *stats.kills, f"{stats.mean_kills:g}"]
            )
        return buffer.getvalue().encode("utf-8")
