"""Batched Gumbel-softmax descent (GSO) and its evolutionary variant (EvoGSO)."""

import math
import time
from collections.abc import Sequence
from typing import Optional

import numpy as np
from loguru import logger

from ..exceptions import ConfigError
from ..models.config import EvoConfig, GsoConfig, ObjectiveSpec
from ..models.graph import Problem, ThetaPopulation
from ..models.result import RunResult
from . import objectives
from .evolution import elite_count, ga_phase, selective_substitution
from .optimizers import make_optimizer
from .relaxation import backprop_theta, gumbel_noise, gumbel_softmax_sample, hard_decode, probabilities, temperature_at


def detect_convergence(trajectory: Sequence[float], window: int = 500, tol: Optional[float] = None) -> bool:
    """True when the running best improved by less than `tol` over the last `window` steps.

    The default tolerance is 1e-6 * |current best| + 1e-9.
    """
    if len(trajectory) < window:
        return False
    latest = trajectory[-1]
    earlier = trajectory[-window]
    if not (math.isfinite(latest) and math.isfinite(earlier)):
        return False
    if tol is None:
        tol = 1e-6 * abs(latest) + 1e-9
    return earlier - latest < tol


def make_streams(seed: int) -> tuple[np.random.Generator, np.random.Generator, np.random.Generator]:
    """Independent counter-based streams for initialization, sampling noise and evolution."""
    init_seq, noise_seq, evo_seq = np.random.SeedSequence(seed).spawn(3)
    return (
        np.random.Generator(np.random.Philox(init_seq)),
        np.random.Generator(np.random.Philox(noise_seq)),
        np.random.Generator(np.random.Philox(evo_seq)),
    )


def _run(problem: Problem, spec: ObjectiveSpec, gso: GsoConfig, evo: Optional[EvoConfig]) -> RunResult:
    init_rng, noise_rng, evo_rng = make_streams(gso.seed)
    population = ThetaPopulation.initialize(gso.n_replicas, problem.n, spec.n_states, init_rng)
    theta = population.values
    optimizer = make_optimizer(gso)
    schedule = gso.schedule

    substitution_on = evo is not None and evo.t1 is not None
    ga_on = evo is not None and evo.t2 is not None
    if substitution_on and evo.replaced_count(gso.n_replicas) < 1:
        raise ConfigError(f"u_inverse={evo.u_inverse} replaces no replica out of {gso.n_replicas}")

    best_energy = math.inf
    best_labels = None
    replica_fitness = np.full(gso.n_replicas, math.inf)
    trajectory: list[float] = []
    events: list[dict] = []
    converged_at: Optional[int] = None
    steps_done = 0

    started = time.perf_counter()
    for step in range(gso.max_steps):
        tau = temperature_at(schedule, step)
        p = probabilities(theta)
        g = gumbel_noise(theta.shape, noise_rng)
        p_hat = gumbel_softmax_sample(p, g, tau)

        labels = hard_decode(p_hat)
        energies = objectives.hard_energies(spec, problem, labels)
        feasible = objectives.feasibility_mask(spec, problem, labels)
        replica_fitness = np.minimum(replica_fitness, energies)
        candidates = np.where(feasible, energies, math.inf)
        winner = int(np.argmin(candidates))
        if candidates[winner] < best_energy:
            best_energy = float(candidates[winner])
            best_labels = labels[winner].copy()
        trajectory.append(best_energy)

        grad = backprop_theta(objectives.soft_energy_grad(spec, problem, p_hat), p, g, tau, theta)
        theta = optimizer.step(theta, grad)
        steps_done = step + 1

        if substitution_on and steps_done % evo.t1 == 0:
            theta, replaced = selective_substitution(
                theta, replica_fitness, evo.u_inverse, evo.substitution_mode,
                evo.variance_threshold, evo_rng, evo.substitution_noise,
            )
            if replaced.size:
                # replaced replicas re-earn their fitness from the next evaluation
                replica_fitness[replaced] = math.inf
                optimizer.reset(replaced)
                events.append({"step": steps_done, "event": "substitution", "replaced": int(replaced.size)})
                logger.debug("Step {}: substituted {} replicas", steps_done, replaced.size)

        if ga_on:
            if converged_at is None and detect_convergence(trajectory, evo.convergence_window, evo.convergence_tol):
                converged_at = steps_done
                logger.debug("Step {}: first convergence", steps_done)
            if converged_at is not None and (steps_done - converged_at) % evo.t2 == 0:
                order = np.argsort(replica_fitness, kind="stable")
                n_elite = elite_count(evo.elite_ratio, gso.n_replicas)
                theta = ga_phase(theta, replica_fitness, evo, evo_rng)
                elite_fitness = replica_fitness[order[:n_elite]]
                replica_fitness = np.full(gso.n_replicas, math.inf)
                replica_fitness[:n_elite] = elite_fitness
                optimizer.reset()
                events.append({"step": steps_done, "event": "ga_phase", "elites": n_elite})
                logger.debug("Step {}: GA phase with {} elites", steps_done, n_elite)
        elif gso.early_stop_window is not None and detect_convergence(trajectory, gso.early_stop_window):
            logger.debug("Step {}: converged, stopping", steps_done)
            break
    wall = time.perf_counter() - started

    if best_labels is None:
        logger.warning("No feasible solution found in {} steps (seed {})", steps_done, gso.seed)
        return RunResult.infeasible(trajectory, wall, gso.seed, steps_done, events)
    return RunResult(
        best_labels=best_labels,
        best_energy=best_energy,
        best_metric=objectives.metric_from_energy(spec, problem, best_energy, best_labels),
        trajectory=trajectory,
        wall_seconds=wall,
        seed=gso.seed,
        feasible=True,
        steps=steps_done,
        events=events,
    )


def gso_run(problem: Problem, spec: ObjectiveSpec, config: GsoConfig) -> RunResult:
    """Gumbel-softmax descent over `config.n_replicas` replicas; returns the best feasible solution."""
    return _run(problem, spec, config, None)


def evo_gso_run(problem: Problem, spec: ObjectiveSpec, gso: GsoConfig, evo: EvoConfig) -> RunResult:
    """GSO with selective substitution every t1 steps and a GA phase every t2 steps after convergence."""
    return _run(problem, spec, gso, evo)
