"""`bench` and `sweep` commands."""

import math

import pandas as pd
from loguru import logger

from ..models.config import ExperimentConfig
from ..models.result import ReportRow
from ..services import harness
from . import EXIT_INFEASIBLE, EXIT_OK


def _print_rows(rows: list[ReportRow]) -> None:
    frame = pd.DataFrame([row.to_dict() for row in rows]).drop(columns=["digest"])
    print(frame.to_string(index=False))


def _status(rows: list[ReportRow]) -> int:
    if rows and all(math.isnan(row.best) for row in rows):
        return EXIT_INFEASIBLE
    return EXIT_OK


def handle_bench(cfg: ExperimentConfig) -> int:
    """Run all instances and print the aggregate rows."""
    rows = harness.run_experiment(cfg)
    _print_rows(rows)
    logger.info("Results written to {}", cfg.out_dir)
    return _status(rows)


def handle_sweep(cfg: ExperimentConfig) -> int:
    """Bench once per sweep value and report the winning row."""
    rows = harness.run_experiment(cfg)
    _print_rows(rows)
    status = _status(rows)
    if status == EXIT_OK and cfg.objective is not None:
        winner = harness.best_row(rows, cfg.objective.kind)
        print(f"best: {winner.sweep_parameter}={winner.sweep_value} -> {winner.best:.6f}")
    logger.info("Results written to {}", cfg.out_dir)
    return status
