from __future__ import annotations

import csv
import logging
import os
import tempfile
from dataclasses import dataclass
from statistics import mean
from typing import Optional

from ..contracts.types import StorageMode
from ..errors import IoFailure

logger = logging.getLogger(__name__)


def saving_vs_variables(logs_gas, variables_gas):
    """Percentage of Variables-mode gas that Logs mode saves."""
    return (1 - logs_gas / variables_gas) * 100


@dataclass(frozen=True)
class GasReport:
    mode: StorageMode
    operation: str
    gas_used: int
    saving_vs_variables: Optional[float] = None

    COLUMNS = ("mode", "operation", "gas_used", "saving_vs_variables")

    def row(self):
        saving = "" if self.saving_vs_variables is None else f"{self.saving_vs_variables:.2f}"
        return [self.mode.value, self.operation, self.gas_used, saving]


@dataclass(frozen=True)
class LatencyReport:
    mode: StorageMode
    n_twins: int
    total_latency: float
    mean_per_tx: float
    difficulty: int
    runs: int

    COLUMNS = ("mode", "n_twins", "total_latency", "mean_per_tx", "difficulty", "runs")

    @classmethod
    def from_runs(cls, mode, n_twins, totals, difficulty):
        """Mean over runs; ``mean_per_tx`` is in milliseconds."""
        total = mean(totals)
        return cls(
            mode=mode,
            n_twins=n_twins,
            total_latency=total,
            mean_per_tx=total / n_twins * 1000,
            difficulty=difficulty,
            runs=len(totals),
        )

    def row(self):
        return [
            self.mode.value,
            self.n_twins,
            f"{self.total_latency:.6f}",
            f"{self.mean_per_tx:.6f}",
            self.difficulty,
            self.runs,
        ]


def emit_csv(rows, path, report_type):
    """Write a header plus one line per report, replacing ``path`` atomically."""
    directory = os.path.dirname(os.path.abspath(path))
    tmp_path = None
    try:
        with tempfile.NamedTemporaryFile(
            "w", newline="", dir=directory, prefix=".report-", suffix=".csv", delete=False
        ) as f:
            tmp_path = f.name
            writer = csv.writer(f)
            writer.writerow(report_type.COLUMNS)
            for report in rows:
                writer.writerow(report.row())
        os.replace(tmp_path, path)
    except OSError as e:
        if tmp_path is not None and os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise IoFailure(f"cannot write {path}: {e}") from e
    logger.info("wrote %s rows to %s", len(rows), path)
    return path


def format_table(rows, report_type):
    lines = [list(report_type.COLUMNS)] + [[str(cell) for cell in report.row()] for report in rows]
    widths = [max(len(line[i]) for line in lines) for i in range(len(report_type.COLUMNS))]
    return "\n".join(
        "  ".join(cell.ljust(width) for cell, width in zip(line, widths)).rstrip()
        for line in lines
    )
