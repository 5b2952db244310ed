"""Solver outcome data models."""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import numpy.typing as npt


@dataclass(frozen=True)
class EnergyReport:
    """Exact evaluation of one hard assignment."""
    energy: float
    feasible: bool
    derived_metric: float


@dataclass
class RunResult:
    """Best solution found by one solver run.

    When no feasible assignment was ever seen, `feasible` is False,
    `best_labels` is None and `best_energy` is +inf.
    """
    best_labels: Optional[npt.NDArray[np.int64]]
    best_energy: float
    best_metric: float
    trajectory: list[float]
    wall_seconds: float
    seed: int
    feasible: bool
    steps: int = 0
    events: list[dict] = field(default_factory=list)

    @classmethod
    def infeasible(cls, trajectory: list[float], wall_seconds: float, seed: int,
                   steps: int = 0, events: Optional[list[dict]] = None) -> "RunResult":
        return cls(
            best_labels=None,
            best_energy=math.inf,
            best_metric=math.nan,
            trajectory=trajectory,
            wall_seconds=wall_seconds,
            seed=seed,
            feasible=False,
            steps=steps,
            events=events or [],
        )

    def to_dict(self, trajectory_stride: int = 10):
        """Convert run result to a JSON-ready dictionary (wall time excluded)."""
        return {
            "seed": self.seed,
            "feasible": self.feasible,
            "best_energy": self.best_energy if self.feasible else None,
            "best_metric": self.best_metric if self.feasible else None,
            "best_labels": self.best_labels.tolist() if self.best_labels is not None else None,
            "steps": self.steps,
            "trajectory": [
                value if math.isfinite(value) else None
                for value in self.trajectory[::trajectory_stride]
            ],
            "events": self.events,
        }


@dataclass(frozen=True)
class Summary:
    """Mean and standard error of a sample; `single_sample` flags n == 1."""
    mean: float
    sem: float
    single_sample: bool = False


@dataclass
class ReportRow:
    """Aggregate of one configuration over its instances."""
    digest: str
    label: str
    metrics: list[Optional[float]]
    mean: float
    sem: float
    best: float
    mean_wall_seconds: float
    infeasible_count: int = 0
    sweep_parameter: Optional[str] = None
    sweep_value: Optional[float | int | str] = None

    @property
    def instances(self) -> int:
        return len(self.metrics)

    def to_dict(self):
        return {
            "digest": self.digest,
            "label": self.label,
            "sweep_parameter": self.sweep_parameter,
            "sweep_value": self.sweep_value,
            "instances": self.instances,
            "mean": self.mean,
            "sem": self.sem,
            "best": self.best,
            "mean_wall_seconds": self.mean_wall_seconds,
            "infeasible": self.infeasible_count,
        }
