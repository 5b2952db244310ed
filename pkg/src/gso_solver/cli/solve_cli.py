"""`solve` and `oracle` commands."""

import json
from pathlib import Path

import numpy as np
from loguru import logger

from ..exceptions import ConfigError
from ..models.config import ExperimentConfig
from ..models.graph import Problem
from ..services import harness, objectives
from ..services.graph_service import builtin_graph, generate_sk, load_edge_list_file
from ..services.oracle import exhaustive_minimum
from . import EXIT_INFEASIBLE, EXIT_OK


def load_problem(cfg: ExperimentConfig, index: int = 0) -> Problem:
    """The problem of instance `index` (graphs are fixed, SK couplings are drawn per instance)."""
    if cfg.problem == "sk":
        return generate_sk(cfg.sk_n, harness.derive_seed(cfg.seed, index, 0))
    if cfg.problem == "graph":
        if cfg.builtin_graph is not None:
            return builtin_graph(cfg.builtin_graph)
        return load_edge_list_file(cfg.graph_path)
    raise ConfigError("test functions are run through the bench command")


def handle_solve(cfg: ExperimentConfig) -> int:
    """Solve instance 0 once and print the outcome."""
    problem = load_problem(cfg)
    result = harness.solve(cfg, problem, harness.derive_seed(cfg.seed, 0, 1))
    print(f"solver:    {cfg.solver}")
    print(f"objective: {cfg.objective.kind.value} (K={cfg.objective.n_states})")
    print(f"feasible:  {result.feasible}")
    print(f"energy:    {result.best_energy:.6f}")
    print(f"metric:    {result.best_metric:.6f}")
    print(f"wall:      {result.wall_seconds:.3f}s")

    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"solve_{harness.config_digest(cfg)}.json"
    path.write_text(json.dumps(result.to_dict(harness.TRAJECTORY_STRIDE), sort_keys=True, indent=2) + "\n",
                    encoding="utf-8")
    logger.info("Wrote {}", path)
    return EXIT_OK if result.feasible else EXIT_INFEASIBLE


def handle_oracle(cfg: ExperimentConfig) -> int:
    """Enumerate a small instance exhaustively and compare with the configured solver."""
    problem = load_problem(cfg)
    energy, labels = exhaustive_minimum(cfg.objective, problem)
    if labels is None:
        print("oracle: no feasible assignment")
        return EXIT_INFEASIBLE
    metric = objectives.metric_from_energy(cfg.objective, problem, energy, labels)
    print(f"oracle energy: {energy:.6f}")
    print(f"oracle metric: {metric:.6f}")
    print(f"oracle labels: {' '.join(str(v) for v in labels)}")

    result = harness.solve(cfg, problem, harness.derive_seed(cfg.seed, 0, 1))
    if not result.feasible:
        print(f"{cfg.solver}: no feasible solution")
        return EXIT_INFEASIBLE
    gap = result.best_energy - energy
    print(f"{cfg.solver} energy: {result.best_energy:.6f} (gap {gap:.3g})")
    if gap < -1e-9:
        logger.error("Solver energy {} below the exhaustive optimum {}", result.best_energy, energy)
    print(f"optimal: {bool(np.isclose(gap, 0.0, atol=1e-9))}")
    return EXIT_OK
