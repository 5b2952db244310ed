"""Solver and experiment configuration models."""

import math
from enum import Enum
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ObjectiveKind(str, Enum):
    MODULARITY = "modularity"
    SK = "sk"
    MIS = "mis"
    MVC = "mvc"


class ScheduleMode(str, Enum):
    EXPONENTIAL = "exponential"
    LINEAR = "linear"
    CONSTANT = "constant"


class SubstitutionMode(str, Enum):
    BEST_COPY = "best_copy"
    BEST_NOISE = "best_noise"
    REINIT = "reinit"


DEFAULT_ALPHA = 3.0

DEFAULT_STEPS = {
    ObjectiveKind.MODULARITY: 10000,
    ObjectiveKind.SK: 2000,
    ObjectiveKind.MIS: 20000,
    ObjectiveKind.MVC: 20000,
}


class ObjectiveSpec(BaseModel):
    """Which energy is minimized and over how many node states."""
    model_config = ConfigDict(frozen=True)

    kind: ObjectiveKind
    n_states: int = 2
    alpha: float = DEFAULT_ALPHA

    @model_validator(mode="after")
    def check_states(self):
        if self.kind == ObjectiveKind.MODULARITY:
            if not 2 <= self.n_states <= 20:
                raise ValueError("modularity needs 2 <= n_states <= 20")
        elif self.n_states != 2:
            raise ValueError(f"{self.kind.value} is a two-state objective")
        if self.kind in (ObjectiveKind.MIS, ObjectiveKind.MVC) and self.alpha <= 0:
            raise ValueError("alpha must be positive")
        return self

    @property
    def is_constrained(self) -> bool:
        return self.kind in (ObjectiveKind.MIS, ObjectiveKind.MVC)


class TemperatureSchedule(BaseModel):
    """Annealing schedule for the Gumbel-softmax temperature."""
    model_config = ConfigDict(frozen=True)

    tau_init: float = Field(20.0, gt=0)
    tau_final: float = Field(1.0, gt=0)
    total_steps: int = Field(2000, ge=1)
    mode: ScheduleMode = ScheduleMode.EXPONENTIAL

    @model_validator(mode="after")
    def check_order(self):
        if self.tau_init < self.tau_final:
            raise ValueError("tau_init must be >= tau_final")
        return self


class GsoConfig(BaseModel):
    """Batched Gumbel-softmax descent settings."""
    model_config = ConfigDict(frozen=True)

    n_replicas: int = Field(1, ge=1)
    learning_rate: float = Field(1.0, gt=0)
    max_steps: int = Field(2000, ge=1)
    tau_init: float = Field(20.0, gt=0)
    tau_final: float = Field(1.0, gt=0)
    schedule_mode: ScheduleMode = ScheduleMode.EXPONENTIAL
    seed: int = 0
    optimizer: Literal["sgd", "adam"] = "sgd"
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    # stop once the running best stalls for this many steps; None runs all steps
    early_stop_window: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def check_taus(self):
        if self.tau_init < self.tau_final:
            raise ValueError("tau_init must be >= tau_final")
        return self

    @property
    def schedule(self) -> TemperatureSchedule:
        return TemperatureSchedule(
            tau_init=self.tau_init,
            tau_final=self.tau_final,
            total_steps=self.max_steps,
            mode=self.schedule_mode,
        )


class EvoConfig(BaseModel):
    """Evolution operators layered on top of the gradient loop.

    `t1` or `t2` set to None disables the corresponding operator.
    """
    model_config = ConfigDict(frozen=True)

    t1: Optional[int] = Field(100, ge=1)
    u_inverse: float = Field(0.125, gt=0, le=0.5)
    variance_threshold: float = 1e-6
    substitution_mode: SubstitutionMode = SubstitutionMode.BEST_COPY
    substitution_noise: float = Field(0.1, ge=0)
    t2: Optional[int] = Field(None, ge=1)
    mutation_rate: float = Field(0.001, ge=0, le=1)
    elite_ratio: float = Field(0.0625, ge=0, lt=1)
    crossover_rate: float = Field(0.8, ge=0, le=1)
    convergence_window: int = Field(500, ge=1)
    convergence_tol: Optional[float] = Field(None, ge=0)

    @model_validator(mode="after")
    def check_cycles(self):
        if self.t1 is not None and self.t2 is not None and self.t2 <= self.t1:
            raise ValueError("t2 must be larger than t1")
        return self

    @classmethod
    def disabled(cls) -> "EvoConfig":
        return cls(t1=None, t2=None)

    def replaced_count(self, n_replicas: int) -> int:
        return math.floor(n_replicas * self.u_inverse + 1e-9)


class SaConfig(BaseModel):
    """Metropolis simulated annealing with geometric cooling per sweep."""
    model_config = ConfigDict(frozen=True)

    t_init: float = Field(2.0, gt=0)
    t_final: float = Field(0.01, gt=0)
    sweeps: int = Field(1000, ge=1)
    seed: int = 0

    @model_validator(mode="after")
    def check_temperatures(self):
        if self.t_init < self.t_final:
            raise ValueError("t_init must be >= t_final")
        return self

    @property
    def cooling(self) -> float:
        if self.sweeps == 1:
            return 1.0
        return (self.t_final / self.t_init) ** (1.0 / (self.sweeps - 1))


class GaConfig(BaseModel):
    """Label-string genetic algorithm settings."""
    model_config = ConfigDict(frozen=True)

    population: int = Field(64, ge=2)
    crossover_rate: float = Field(0.8, ge=0, le=1)
    mutation_rate: float = Field(0.001, ge=0, le=1)
    elite_ratio: float = Field(0.125, ge=0, lt=1)
    generations: int = Field(2000, ge=1)
    seed: int = 0


class SweepSpec(BaseModel):
    """One hyper-parameter varied over a list of values, everything else fixed."""
    model_config = ConfigDict(frozen=True)

    parameter: str
    values: list[float | int | str]


SolverName = Literal["gso", "evogso", "sa", "ga", "greedy", "md-greedy"]
ProblemSource = Literal["graph", "sk", "testfunction"]


class ExperimentConfig(BaseModel):
    """Everything needed to reproduce one benchmark table row (or sweep)."""
    model_config = ConfigDict(frozen=True)

    problem: ProblemSource
    graph_path: Optional[str] = None
    builtin_graph: Optional[str] = None
    sk_n: Optional[int] = Field(None, ge=2)
    function: Optional[Literal["griewank", "rastrigin", "sphere"]] = None
    function_dim: int = Field(2, ge=1)
    objective: Optional[ObjectiveSpec] = None
    solver: SolverName = "gso"
    gso: GsoConfig = GsoConfig()
    evo: EvoConfig = EvoConfig()
    sa: SaConfig = SaConfig()
    ga: GaConfig = GaConfig()
    greedy_order: Literal["by_id", "random"] = "by_id"
    instances: int = Field(1, ge=1)
    seed: int = 0
    sweep: Optional[SweepSpec] = None
    allow_large_sk: bool = False
    # not part of the digest
    out_dir: str = "results"
    workers: int = Field(1, ge=1)

    @model_validator(mode="after")
    def check_source(self):
        sources = {
            "graph": (self.graph_path, self.builtin_graph),
            "sk": (self.sk_n,),
            "testfunction": (self.function,),
        }
        given = [name for name, values in sources.items() if any(v is not None for v in values)]
        if given != [self.problem]:
            raise ValueError(f"exactly one problem source expected for '{self.problem}', got {given or 'none'}")
        if self.problem == "graph" and self.graph_path is not None and self.builtin_graph is not None:
            raise ValueError("give either graph_path or builtin_graph, not both")
        if self.problem != "testfunction" and self.objective is None:
            raise ValueError("an objective is required for graph and sk problems")
        if self.problem == "sk" and self.objective.kind != ObjectiveKind.SK:
            raise ValueError("sk problems take the sk objective")
        if self.problem == "graph" and self.objective.kind == ObjectiveKind.SK:
            raise ValueError("the sk objective needs an sk problem source")
        if self.problem == "sk" and self.sk_n > 4096 and not self.allow_large_sk:
            raise ValueError("sk_n above 4096 requires allow_large_sk")
        if self.solver in ("greedy", "md-greedy") and (
                self.objective is None or not self.objective.is_constrained):
            raise ValueError("greedy solvers only handle mis and mvc")
        return self
