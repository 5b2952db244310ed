"""Data models for the solver toolkit."""

from .graph import Graph, SkInstance, ThetaPopulation, Problem, SoftAssignment, HardAssignment
from .config import (
    ObjectiveKind, ObjectiveSpec, TemperatureSchedule, ScheduleMode, SubstitutionMode,
    GsoConfig, EvoConfig, SaConfig, GaConfig, SweepSpec, ExperimentConfig,
)
from .result import EnergyReport, RunResult, Summary, ReportRow

__all__ = [
    "Graph", "SkInstance", "ThetaPopulation", "Problem", "SoftAssignment", "HardAssignment",
    "ObjectiveKind", "ObjectiveSpec", "TemperatureSchedule", "ScheduleMode", "SubstitutionMode",
    "GsoConfig", "EvoConfig", "SaConfig", "GaConfig", "SweepSpec", "ExperimentConfig",
    "EnergyReport", "RunResult", "Summary", "ReportRow",
]
