"""Experiment orchestration: instances, sweeps, persistence and aggregation."""

import hashlib
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Optional

import numpy as np
import pandas as pd
from loguru import logger
from pydantic import BaseModel, ValidationError

from ..exceptions import ConfigError
from ..models.config import ExperimentConfig, ObjectiveKind
from ..models.graph import Graph, Problem
from ..models.result import ReportRow, RunResult, Summary
from . import baselines, solver, testfunctions
from .graph_service import builtin_graph, generate_sk, load_edge_list_file

PARAMETER_ALIASES = {
    "batch": "gso.n_replicas",
    "lr": "gso.learning_rate",
    "steps": "gso.max_steps",
    "tau_init": "gso.tau_init",
    "tau_final": "gso.tau_final",
    "optimizer": "gso.optimizer",
    "ncoms": "objective.n_states",
    "alpha": "objective.alpha",
    "t1": "evo.t1",
    "t2": "evo.t2",
    "u_inverse": "evo.u_inverse",
    "mutation": "evo.mutation_rate",
    "elite": "evo.elite_ratio",
    "sweeps": "sa.sweeps",
    "population": "ga.population",
    "generations": "ga.generations",
}

# fields that do not change results
NON_SEMANTIC_FIELDS = {"out_dir", "workers", "sweep", "allow_large_sk"}
# parameter blocks each solver reads; their seeds are replaced per instance
SOLVER_BLOCKS = {
    "gso": ("gso",),
    "evogso": ("gso", "evo"),
    "sa": ("sa",),
    "ga": ("ga",),
    "greedy": ("greedy_order",),
    "md-greedy": (),
}
BLOCK_FIELDS = {"gso", "evo", "sa", "ga", "greedy_order"}
# the test-function lab reads only these
FUNCTION_FIELDS = {"gso": {"learning_rate", "max_steps", "n_replicas"}, "evo": {"t1", "u_inverse"}}
TRAJECTORY_STRIDE = 10


def summarize(values: list[float]) -> Summary:
    """Mean and standard error (sample std with n-1 divisor over sqrt(n)).

    A single value gives SEM 0 and sets `single_sample`.
    """
    data = np.asarray(values, dtype=np.float64)
    if data.size == 0:
        return Summary(mean=math.nan, sem=math.nan)
    if data.size == 1:
        return Summary(mean=float(data[0]), sem=0.0, single_sample=True)
    return Summary(mean=float(data.mean()), sem=float(data.std(ddof=1) / math.sqrt(data.size)))


def config_digest(cfg: ExperimentConfig) -> str:
    """Hash of every field that can change a result.

    Only the parameter blocks the chosen solver reads take part, so two
    configs differing in an unused block share a digest.
    """
    payload = cfg.model_dump(mode="json", exclude=NON_SEMANTIC_FIELDS | BLOCK_FIELDS)
    if cfg.problem == "testfunction":
        del payload["solver"]
        for block, fields in FUNCTION_FIELDS.items():
            payload[block] = getattr(cfg, block).model_dump(mode="json", include=fields)
    else:
        del payload["function_dim"]
        for block in SOLVER_BLOCKS[cfg.solver]:
            value = getattr(cfg, block)
            payload[block] = value.model_dump(mode="json", exclude={"seed"}) if isinstance(value, BaseModel) else value
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def resolve_parameter(name: str) -> list[str]:
    """Dotted path of a sweepable field; raises ConfigError for unknown names."""
    path = PARAMETER_ALIASES.get(name, name).split(".")
    model: type[BaseModel] = ExperimentConfig
    for depth, part in enumerate(path):
        field = model.model_fields.get(part)
        if field is None:
            raise ConfigError(f"unknown config field '{name}'")
        if depth < len(path) - 1:
            annotation = field.annotation
            nested = [arg for arg in getattr(annotation, "__args__", (annotation,))
                      if isinstance(arg, type) and issubclass(arg, BaseModel)]
            if not nested:
                raise ConfigError(f"'{part}' in '{name}' has no sub-fields")
            model = nested[0]
    return path


def with_parameter(cfg: ExperimentConfig, name: str, value: Any) -> ExperimentConfig:
    """Copy of `cfg` with one (possibly nested) field replaced and revalidated."""
    path = resolve_parameter(name)
    if isinstance(value, str) and value.lower() in ("none", "off"):
        value = None
    data = cfg.model_dump()
    target = data
    for part in path[:-1]:
        if target.get(part) is None:
            raise ConfigError(f"cannot set '{name}': '{part}' is not configured")
        target = target[part]
    target[path[-1]] = value
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid value {value!r} for '{name}': {e}")


def derive_seed(master: int, index: int, stream: int) -> int:
    """Per-instance seed from (master seed, instance index, stream id)."""
    return int(np.random.SeedSequence([master, index, stream]).generate_state(1, dtype=np.uint32)[0])


def _load_graph(cfg: ExperimentConfig) -> Graph:
    if cfg.builtin_graph is not None:
        return builtin_graph(cfg.builtin_graph)
    return load_edge_list_file(cfg.graph_path)


def solve(cfg: ExperimentConfig, problem: Problem, seed: int) -> RunResult:
    """Run the configured solver once on `problem`."""
    spec = cfg.objective
    if cfg.solver == "gso":
        return solver.gso_run(problem, spec, cfg.gso.model_copy(update={"seed": seed}))
    if cfg.solver == "evogso":
        return solver.evo_gso_run(problem, spec, cfg.gso.model_copy(update={"seed": seed}), cfg.evo)
    if cfg.solver == "sa":
        return baselines.simulated_annealing(problem, spec, cfg.sa.model_copy(update={"seed": seed}))
    if cfg.solver == "ga":
        return baselines.label_ga(problem, spec, cfg.ga.model_copy(update={"seed": seed}))

    started = time.perf_counter()
    if cfg.solver == "md-greedy":
        subset = baselines.md_greedy_mis(problem)
    else:
        subset = baselines.greedy_mis(problem, cfg.greedy_order, seed)
    return baselines.subset_result(problem, spec, subset, time.perf_counter() - started, seed)


def _run_instance(cfg: ExperimentConfig, digest: str, index: int,
                  graph: Optional[Graph]) -> tuple[dict, float]:
    record: dict[str, Any] = {"digest": digest, "instance": index, "solver": cfg.solver}
    if cfg.problem == "sk":
        problem_seed = derive_seed(cfg.seed, index, 0)
        problem = generate_sk(cfg.sk_n, problem_seed)
        record["problem_seed"] = problem_seed
    else:
        problem = graph
    result = solve(cfg, problem, derive_seed(cfg.seed, index, 1))
    record.update(result.to_dict(TRAJECTORY_STRIDE))
    if result.feasible:
        logger.info("Instance {} ({}): metric {:.6f}", index, digest, result.best_metric)
    else:
        logger.warning("Instance {} ({}): no feasible solution", index, digest)
    return record, result.wall_seconds


def aggregate(kind: Optional[ObjectiveKind], digest: str, label: str, records: list[dict],
              walls: list[float], sweep_parameter: Optional[str] = None,
              sweep_value: Any = None) -> ReportRow:
    """Report row from per-instance records.

    `best` is the maximum metric for modularity and mis, the minimum for
    sk and mvc; mean and SEM are taken over feasible instances.
    """
    metrics = [r["best_metric"] for r in records]
    feasible = [m for m in metrics if m is not None]
    summary = summarize(feasible)
    if not feasible:
        best = math.nan
    elif kind in (ObjectiveKind.MODULARITY, ObjectiveKind.MIS, None):
        best = max(feasible)
    else:
        best = min(feasible)
    return ReportRow(
        digest=digest,
        label=label,
        metrics=metrics,
        mean=summary.mean,
        sem=summary.sem,
        best=best,
        mean_wall_seconds=float(np.mean(walls)) if walls else math.nan,
        infeasible_count=len(metrics) - len(feasible),
        sweep_parameter=sweep_parameter,
        sweep_value=sweep_value,
    )


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def run_config(cfg: ExperimentConfig, sweep_parameter: Optional[str] = None,
               sweep_value: Any = None) -> ReportRow:
    """All instances of one configuration; persists records and returns the aggregate row."""
    digest = config_digest(cfg)
    label = f"{cfg.solver}" if sweep_parameter is None else f"{cfg.solver} {sweep_parameter}={sweep_value}"
    graph = _load_graph(cfg) if cfg.problem == "graph" else None

    with ThreadPoolExecutor(max_workers=cfg.workers) as executor:
        outcomes = list(executor.map(lambda i: _run_instance(cfg, digest, i, graph), range(cfg.instances)))
    records = [record for record, _ in outcomes]
    walls = [wall for _, wall in outcomes]

    record_dir = Path(cfg.out_dir) / "records" / digest
    record_dir.mkdir(parents=True, exist_ok=True)
    _write_json(record_dir / "config.json", {
        "config": cfg.model_dump(mode="json"),
        "label": label,
        "sweep_parameter": sweep_parameter,
        "sweep_value": sweep_value,
    })
    for record in records:
        _write_json(record_dir / f"instance_{record['instance']:04d}.json", record)
    pd.DataFrame({"instance": range(cfg.instances), "wall_seconds": walls}).to_csv(
        record_dir / "timings.csv", index=False)

    kind = cfg.objective.kind if cfg.objective else None
    return aggregate(kind, digest, label, records, walls, sweep_parameter, sweep_value)


def run_function_experiment(cfg: ExperimentConfig) -> list[ReportRow]:
    """Trials of the three descent variants on a test function, one row per variant."""
    function = testfunctions.BenchmarkFunction(cfg.function, cfg.function_dim)
    seeds = [derive_seed(cfg.seed, i, 1) for i in range(cfg.instances)]
    started = time.perf_counter()
    trials = testfunctions.run_function_trials(
        function, seeds,
        learning_rate=cfg.gso.learning_rate,
        steps=cfg.gso.max_steps,
        cycle=cfg.evo.t1 or cfg.gso.max_steps,
        population=cfg.gso.n_replicas,
        u_inverse=cfg.evo.u_inverse,
    )
    wall = (time.perf_counter() - started) / max(1, cfg.instances)
    digest = config_digest(cfg)
    testfunctions.write_trials(trials, Path(cfg.out_dir) / "records" / digest / "trials.csv")

    counts = testfunctions.success_counts(trials)
    rows = []
    for variant in testfunctions.VARIANTS:
        success = trials.loc[trials["variant"] == variant, "success"].astype(float).tolist()
        summary = summarize(success)
        rows.append(ReportRow(
            digest=digest,
            label=variant,
            metrics=success,
            mean=summary.mean,
            sem=summary.sem,
            best=float(counts[variant]),
            mean_wall_seconds=wall,
        ))
    return rows


def expand_sweep(cfg: ExperimentConfig) -> list[tuple[ExperimentConfig, Optional[str], Any]]:
    """One config per sweep value (or the config itself when there is no sweep)."""
    if cfg.sweep is None:
        return [(cfg, None, None)]
    resolve_parameter(cfg.sweep.parameter)
    return [(with_parameter(cfg, cfg.sweep.parameter, value), cfg.sweep.parameter, value)
            for value in cfg.sweep.values]


def write_summary(rows: list[ReportRow], out_dir: str | Path) -> Path:
    path = Path(out_dir) / "summary.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame([row.to_dict() for row in rows]).to_csv(path, index=False)
    return path


def run_experiment(cfg: ExperimentConfig) -> list[ReportRow]:
    """Run every configuration of the experiment and write the aggregate CSV."""
    if cfg.problem == "testfunction":
        rows = run_function_experiment(cfg)
    else:
        rows = []
        for variant, parameter, value in expand_sweep(cfg):
            if parameter is not None:
                logger.info("Sweep {}={}", parameter, value)
            rows.append(run_config(variant, parameter, value))
    write_summary(rows, cfg.out_dir)
    return rows


def reaggregate(out_dir: str | Path) -> list[ReportRow]:
    """Rebuild report rows from persisted records alone."""
    rows = []
    for record_dir in sorted((Path(out_dir) / "records").iterdir()):
        meta_path = record_dir / "config.json"
        if not meta_path.exists():
            continue
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        cfg = ExperimentConfig.model_validate(meta["config"])
        records = [json.loads(p.read_text(encoding="utf-8"))
                   for p in sorted(record_dir.glob("instance_*.json"))]
        walls = pd.read_csv(record_dir / "timings.csv")["wall_seconds"].tolist()
        kind = cfg.objective.kind if cfg.objective else None
        rows.append(aggregate(kind, record_dir.name, meta["label"], records, walls,
                              meta["sweep_parameter"], meta["sweep_value"]))
    return rows


def best_row(rows: list[ReportRow], kind: ObjectiveKind) -> ReportRow:
    """Winning row of a sweep under the objective's reporting direction."""
    finite = [row for row in rows if not math.isnan(row.best)]
    if kind in (ObjectiveKind.MODULARITY, ObjectiveKind.MIS):
        return max(finite, key=lambda row: row.best)
    return min(finite, key=lambda row: row.best)
