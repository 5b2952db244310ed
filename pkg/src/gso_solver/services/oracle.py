"""Exhaustive enumeration for small instances."""

import itertools
import math
from typing import Optional

import numpy as np
import numpy.typing as npt

from ..exceptions import InvalidSizeError
from ..models.config import ObjectiveSpec
from ..models.graph import Problem
from . import objectives

MAX_STATES = 1 << 16
CHUNK = 4096


def exhaustive_minimum(spec: ObjectiveSpec, problem: Problem) -> tuple[float, Optional[npt.NDArray[np.int64]]]:
    """Lowest feasible energy over all K^N assignments, with one minimizer.

    Ties resolve to the lexicographically smallest assignment.
    """
    total = spec.n_states ** problem.n
    if total > MAX_STATES:
        raise InvalidSizeError(f"{total} states exceed the enumeration limit of {MAX_STATES}")

    best_energy, best_labels = math.inf, None
    states = itertools.product(range(spec.n_states), repeat=problem.n)
    while chunk := list(itertools.islice(states, CHUNK)):
        labels = np.array(chunk, dtype=np.int64)
        energies = objectives.hard_energies(spec, problem, labels)
        energies = np.where(objectives.feasibility_mask(spec, problem, labels), energies, math.inf)
        winner = int(np.argmin(energies))
        if energies[winner] < best_energy - 1e-12:
            best_energy, best_labels = float(energies[winner]), labels[winner].copy()
    return best_energy, best_labels
