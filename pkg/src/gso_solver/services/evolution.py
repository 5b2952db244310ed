"""Population operators: selective substitution and the GA phase.

Fitness is always an energy to minimize. Genomes are rows of a 2-D array;
the GA machinery here is shared by the replica logits of EvoGSO and by the
label-string GA baseline.
"""

import math
from collections.abc import Callable

import numpy as np
import numpy.typing as npt

from ..models.config import EvoConfig, SubstitutionMode

ROULETTE_EPS = 1e-9


def _finite_fitness(fitness: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    fitness = np.asarray(fitness, dtype=np.float64)
    finite = np.isfinite(fitness)
    if finite.all():
        return fitness
    worst = fitness[finite].max() + 1.0 if finite.any() else 0.0
    return np.where(finite, fitness, worst)


def substitution_pairs(fitness: npt.NDArray[np.float64],
                       u_inverse: float) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64]]:
    """Best `floor(N_bs / u)` replicas paired with the worst ones, best to worst."""
    order = np.argsort(_finite_fitness(fitness), kind="stable")
    count = math.floor(len(order) * u_inverse + 1e-9)
    if count == 0:
        return order[:0], order[:0]
    return order[:count], order[::-1][:count]


def selective_substitution(theta: npt.NDArray[np.float64], fitness: npt.NDArray[np.float64],
                           u_inverse: float,
                           mode: SubstitutionMode = SubstitutionMode.BEST_COPY,
                           variance_threshold: float = 1e-6,
                           rng: np.random.Generator | None = None,
                           noise_scale: float = 0.1) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.int64]]:
    """Overwrite the worst replicas' logits; returns (new theta, replaced indices).

    Nothing happens unless the fitness variance exceeds `variance_threshold`.
    """
    fitness = _finite_fitness(fitness)
    if not np.var(fitness) > variance_threshold:
        return theta, np.array([], dtype=np.int64)

    sources, targets = substitution_pairs(fitness, u_inverse)
    updated = theta.copy()
    if mode == SubstitutionMode.REINIT:
        updated[targets] = rng.standard_normal(updated[targets].shape)
    else:
        updated[targets] = theta[sources]
        if mode == SubstitutionMode.BEST_NOISE:
            updated[targets] += rng.normal(0.0, noise_scale, size=updated[targets].shape)
    return updated, targets


def elite_count(elite_ratio: float, population: int) -> int:
    return min(population, math.ceil(elite_ratio * population - 1e-9))


def roulette_probabilities(fitness: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """Selection weights max_j f_j - f_i + eps, normalized."""
    fitness = _finite_fitness(fitness)
    weights = fitness.max() - fitness + ROULETTE_EPS
    return weights / weights.sum()


def breed(genomes: npt.NDArray, fitness: npt.NDArray[np.float64], elite_ratio: float,
          crossover_rate: float, mutate: Callable[[npt.NDArray, np.random.Generator], None],
          rng: np.random.Generator) -> tuple[npt.NDArray, npt.NDArray[np.int64]]:
    """One generation: elitism, roulette selection, single-point crossover, mutation.

    Returns the new population (same size) and the parent indices of the
    elites, which occupy the first rows unchanged.
    """
    size, length = genomes.shape
    order = np.argsort(_finite_fitness(fitness), kind="stable")
    n_elite = elite_count(elite_ratio, size)
    children = np.empty_like(genomes)
    children[:n_elite] = genomes[order[:n_elite]]

    probs = roulette_probabilities(fitness)
    slot = n_elite
    while slot < size:
        a, b = rng.choice(size, size=2, p=probs)
        first, second = genomes[a].copy(), genomes[b].copy()
        if length > 1 and rng.random() < crossover_rate:
            cut = rng.integers(1, length)
            first[cut:], second[cut:] = genomes[b, cut:], genomes[a, cut:]
        for child in (first, second):
            if slot < size:
                mutate(child, rng)
                children[slot] = child
                slot += 1
    return children, order[:n_elite]


def ga_phase(theta: npt.NDArray[np.float64], fitness: npt.NDArray[np.float64], evo: EvoConfig,
             rng: np.random.Generator) -> npt.NDArray[np.float64]:
    """GA generation over replica logits flattened to N*K genes.

    Mutation re-draws a gene from the Normal(0, 1) initializer with
    probability `evo.mutation_rate`.
    """
    def redraw(child, generator):
        mask = generator.random(child.shape[0]) < evo.mutation_rate
        if mask.any():
            child[mask] = generator.standard_normal(int(mask.sum()))

    flat = theta.reshape(theta.shape[0], -1)
    children, _ = breed(flat, fitness, evo.elite_ratio, evo.crossover_rate, redraw, rng)
    return children.reshape(theta.shape)
