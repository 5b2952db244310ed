"""Reference solvers: simulated annealing, label-string GA, greedy and minimum-degree greedy."""

import heapq
import math
import time
from collections.abc import Iterable
from typing import Literal, Optional

import numpy as np
import numpy.typing as npt
from loguru import logger

from ..models.config import GaConfig, ObjectiveKind, ObjectiveSpec, SaConfig
from ..models.graph import Graph, HardAssignment, Problem
from ..models.result import RunResult
from . import objectives
from .evolution import breed
from .graph_service import complement_set


class LocalMoveState:
    """Current assignment with O(degree) energy deltas for single-node relabels (O(N) for sk)."""

    def __init__(self, spec: ObjectiveSpec, problem: Problem, labels: HardAssignment):
        self.spec = spec
        self.problem = problem
        self.labels = np.array(labels, dtype=np.int64)
        self.energy = float(objectives.hard_energies(spec, problem, self.labels))
        self.violations = 0
        if spec.kind == ObjectiveKind.SK:
            self.sigma = 2.0 * self.labels - 1.0
            self.field = problem.local_fields(self.sigma)
        elif spec.kind == ObjectiveKind.MODULARITY:
            self.m = problem.edge_count
            self.degree_sums = np.bincount(self.labels, weights=problem.degrees,
                                           minlength=spec.n_states).astype(np.float64)
        else:
            self.violations = int(objectives.violation_count(spec, problem, self.labels))

    @property
    def feasible(self) -> bool:
        return self.violations == 0

    def delta(self, node: int, new_label: int) -> float:
        """Energy change of moving `node` to `new_label`."""
        kind = self.spec.kind
        old = self.labels[node]
        if new_label == old:
            return 0.0
        if kind == ObjectiveKind.SK:
            return 2.0 * self.sigma[node] * self.field[node]
        neighbors = self.problem.adjacency[node]
        if kind == ObjectiveKind.MODULARITY:
            k = float(self.problem.degrees[node])
            nbr_labels = self.labels[neighbors]
            gain = np.count_nonzero(nbr_labels == new_label) - np.count_nonzero(nbr_labels == old)
            d_q = gain / self.m - k * (self.degree_sums[new_label] - self.degree_sums[old] + k) / (2.0 * self.m ** 2)
            return -d_q
        direction = 1 - 2 * old
        if kind == ObjectiveKind.MIS:
            selected = int(self.labels[neighbors].sum())
            return direction * (-1.0 + self.spec.alpha * selected)
        unselected = len(neighbors) - int(self.labels[neighbors].sum())
        return direction * (1.0 - self.spec.alpha * unselected)

    def apply(self, node: int, new_label: int, delta: float) -> None:
        kind = self.spec.kind
        old = self.labels[node]
        if new_label == old:
            return
        if kind == ObjectiveKind.SK:
            self.field -= 2.0 * self.sigma[node] * self.problem.row(node)
            self.sigma[node] = -self.sigma[node]
        elif kind == ObjectiveKind.MODULARITY:
            k = self.problem.degrees[node]
            self.degree_sums[old] -= k
            self.degree_sums[new_label] += k
        else:
            neighbors = self.problem.adjacency[node]
            direction = 1 - 2 * old
            selected = int(self.labels[neighbors].sum())
            if kind == ObjectiveKind.MIS:
                self.violations += direction * selected
            else:
                self.violations -= direction * (len(neighbors) - selected)
        self.labels[node] = new_label
        self.energy += delta


def metropolis_accept(delta: float, temperature: float, u: float) -> bool:
    """Accept with probability min(1, exp(-delta / T))."""
    return delta <= 0.0 or u < math.exp(-delta / temperature)


def _finish(spec: ObjectiveSpec, problem: Problem, best_labels: Optional[HardAssignment],
            trajectory: list[float], wall: float, seed: int, steps: int) -> RunResult:
    if best_labels is None:
        logger.warning("No feasible solution found (seed {})", seed)
        return RunResult.infeasible(trajectory, wall, seed, steps)
    report = objectives.hard_energy(spec, problem, best_labels)
    return RunResult(
        best_labels=best_labels,
        best_energy=report.energy,
        best_metric=report.derived_metric,
        trajectory=trajectory,
        wall_seconds=wall,
        seed=seed,
        feasible=True,
        steps=steps,
    )


def simulated_annealing(problem: Problem, spec: ObjectiveSpec, cfg: SaConfig) -> RunResult:
    """Single-site Metropolis annealing; one sweep is N proposals, cooled geometrically per sweep."""
    rng = np.random.default_rng(cfg.seed)
    n, k = problem.n, spec.n_states
    state = LocalMoveState(spec, problem, rng.integers(0, k, size=n))
    best_energy = state.energy if state.feasible else math.inf
    best_labels = state.labels.copy() if state.feasible else None
    trajectory: list[float] = []
    temperature = cfg.t_init

    started = time.perf_counter()
    for _ in range(cfg.sweeps):
        nodes = rng.integers(0, n, size=n)
        offsets = rng.integers(1, k, size=n)
        uniforms = rng.random(n)
        for node, offset, u in zip(nodes, offsets, uniforms):
            new_label = (state.labels[node] + offset) % k
            delta = state.delta(node, new_label)
            if metropolis_accept(delta, temperature, u):
                state.apply(node, new_label, delta)
                if state.feasible and state.energy < best_energy - 1e-12:
                    best_energy = state.energy
                    best_labels = state.labels.copy()
        trajectory.append(best_energy)
        temperature *= cfg.cooling
    wall = time.perf_counter() - started
    return _finish(spec, problem, best_labels, trajectory, wall, cfg.seed, cfg.sweeps)


def label_ga(problem: Problem, spec: ObjectiveSpec, cfg: GaConfig) -> RunResult:
    """GA over label strings with roulette selection, single-point crossover, mutation and elitism."""
    rng = np.random.default_rng(cfg.seed)
    n, k = problem.n, spec.n_states

    def relabel(child, generator):
        mask = generator.random(n) < cfg.mutation_rate
        if mask.any():
            child[mask] = (child[mask] + generator.integers(1, k, size=int(mask.sum()))) % k

    population = rng.integers(0, k, size=(cfg.population, n))
    best_energy = math.inf
    best_labels = None
    trajectory: list[float] = []

    started = time.perf_counter()
    for generation in range(cfg.generations):
        energies = objectives.hard_energies(spec, problem, population)
        candidates = np.where(objectives.feasibility_mask(spec, problem, population), energies, math.inf)
        winner = int(np.argmin(candidates))
        if candidates[winner] < best_energy:
            best_energy = float(candidates[winner])
            best_labels = population[winner].copy()
        trajectory.append(best_energy)
        if generation + 1 < cfg.generations:
            population, _ = breed(population, energies, cfg.elite_ratio, cfg.crossover_rate, relabel, rng)
    wall = time.perf_counter() - started
    return _finish(spec, problem, best_labels, trajectory, wall, cfg.seed, cfg.generations)


def greedy_mis(graph: Graph, order: Literal["by_id", "random"] = "by_id",
               seed: Optional[int] = None) -> set[int]:
    """Scan nodes in order and keep each one that has no kept neighbor."""
    if order == "random":
        sequence = np.random.default_rng(seed).permutation(graph.n)
    else:
        sequence = np.arange(graph.n)
    blocked = np.zeros(graph.n, dtype=bool)
    chosen = set()
    for node in sequence:
        if not blocked[node]:
            chosen.add(int(node))
            blocked[node] = True
            blocked[graph.adjacency[node]] = True
    return chosen


def md_greedy_mis(graph: Graph) -> set[int]:
    """Repeatedly take a minimum residual-degree node (lowest id on ties) and delete its closed neighborhood."""
    degree = graph.degrees.copy()
    alive = np.ones(graph.n, dtype=bool)
    heap = [(int(d), node) for node, d in enumerate(degree)]
    heapq.heapify(heap)
    chosen = set()
    while heap:
        d, node = heapq.heappop(heap)
        if not alive[node] or d != degree[node]:
            continue
        chosen.add(node)
        alive[node] = False
        for neighbor in graph.adjacency[node]:
            if not alive[neighbor]:
                continue
            alive[neighbor] = False
            for second in graph.adjacency[neighbor]:
                if alive[second]:
                    degree[second] -= 1
                    heapq.heappush(heap, (int(degree[second]), int(second)))
    return chosen


def subset_result(graph: Graph, spec: ObjectiveSpec, independent_set: Iterable[int],
                  wall_seconds: float = 0.0, seed: int = 0) -> RunResult:
    """Wrap an independent set as a RunResult; for mvc the cover is its complement."""
    chosen = complement_set(graph, independent_set) if spec.kind == ObjectiveKind.MVC else set(independent_set)
    labels = np.zeros(graph.n, dtype=np.int64)
    labels[np.fromiter(sorted(chosen), dtype=np.int64)] = 1
    return _finish(spec, graph, labels, [], wall_seconds, seed, 0)
