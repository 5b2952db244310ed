"""Continuous multimodal test functions and the GD / GD-restart / GD + substitution comparison."""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np
import numpy.typing as npt
import pandas as pd
from loguru import logger

DOMAINS = {
    "griewank": (-600.0, 600.0),
    "rastrigin": (-5.12, 5.12),
    "sphere": (-10.0, 10.0),
}

SUCCESS_VALUE = 1e-4
SUCCESS_RADIUS = 1e-2

VARIANTS = ("gd", "gd_restart", "hybrid")


@dataclass(frozen=True)
class BenchmarkFunction:
    """Benchmark function with its global minimum 0 at the origin.

    `sphere` is a convex bowl for checking the descent machinery.
    """
    kind: Literal["griewank", "rastrigin", "sphere"]
    dim: int = 2

    @property
    def domain(self) -> tuple[float, float]:
        return DOMAINS[self.kind]

    @property
    def width(self) -> float:
        low, high = self.domain
        return high - low


def evaluate(f: BenchmarkFunction, x: npt.ArrayLike) -> npt.NDArray[np.float64] | float:
    """Function value; x has shape (..., dim)."""
    x = np.asarray(x, dtype=np.float64)
    if f.kind == "griewank":
        scale = np.sqrt(np.arange(1, x.shape[-1] + 1))
        value = 1.0 + np.sum(x * x, axis=-1) / 4000.0 - np.prod(np.cos(x / scale), axis=-1)
    elif f.kind == "rastrigin":
        value = 10.0 * x.shape[-1] + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x), axis=-1)
    else:
        value = np.sum(x * x, axis=-1)
    return float(value) if np.ndim(value) == 0 else value


def gradient(f: BenchmarkFunction, x: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Analytic gradient with the shape of x."""
    x = np.asarray(x, dtype=np.float64)
    if f.kind == "griewank":
        dim = x.shape[-1]
        scale = np.sqrt(np.arange(1, dim + 1))
        cosines = np.cos(x / scale)
        # product of the other coordinates' cosines, per coordinate
        others = np.broadcast_to(cosines[..., None, :], x.shape + (dim,)).copy()
        others[..., np.arange(dim), np.arange(dim)] = 1.0
        return x / 2000.0 + np.sin(x / scale) / scale * np.prod(others, axis=-1)
    if f.kind == "rastrigin":
        return 2.0 * x + 20.0 * np.pi * np.sin(2.0 * np.pi * x)
    return 2.0 * x


def is_success(f: BenchmarkFunction, x: npt.ArrayLike) -> bool:
    """Found the global minimum: f(x) < 1e-4 and max |x_i| < 1e-2."""
    x = np.asarray(x, dtype=np.float64)
    return bool(evaluate(f, x) < SUCCESS_VALUE and np.max(np.abs(x)) < SUCCESS_RADIUS)


def _clip(f: BenchmarkFunction, x: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    return np.clip(x, *f.domain)


def gd_minimize(f: BenchmarkFunction, x0: npt.ArrayLike, learning_rate: float,
                steps: int) -> tuple[npt.NDArray[np.float64], float]:
    """Plain gradient descent from x0; returns the best point visited."""
    x = np.array(x0, dtype=np.float64)
    best_x, best_f = x.copy(), evaluate(f, x)
    for _ in range(steps):
        x = _clip(f, x - learning_rate * gradient(f, x))
        value = evaluate(f, x)
        if value < best_f:
            best_x, best_f = x.copy(), value
    return best_x, float(best_f)


def gd_restart(f: BenchmarkFunction, learning_rate: float, steps: int, cycle: int,
               rng: np.random.Generator) -> tuple[npt.NDArray[np.float64], float]:
    """GD that re-draws its point uniformly in the domain every `cycle` steps."""
    best_x, best_f = None, np.inf
    done = 0
    while done < steps:
        x0 = rng.uniform(*f.domain, size=f.dim)
        x, value = gd_minimize(f, x0, learning_rate, min(cycle, steps - done))
        if value < best_f:
            best_x, best_f = x, value
        done += cycle
    return best_x, float(best_f)


def hybrid_gd_es(f: BenchmarkFunction, population: int, learning_rate: float, steps: int, cycle: int,
                 u_inverse: float, rng: np.random.Generator,
                 noise_fraction: float = 0.1) -> tuple[npt.NDArray[np.float64], float, list[float]]:
    """Parallel GD with selective substitution.

    Every `cycle` steps the worst floor(population * u_inverse) points are
    replaced by the current best point plus Normal(0, noise_fraction * width)
    noise. Returns the best point visited, its value and the per-step
    best-ever trace.
    """
    x = rng.uniform(*f.domain, size=(population, f.dim))
    values = evaluate(f, x)
    winner = int(np.argmin(values))
    best_x, best_f = x[winner].copy(), float(values[winner])
    replaced = max(1, int(population * u_inverse))
    trace = []
    for step in range(1, steps + 1):
        x = _clip(f, x - learning_rate * gradient(f, x))
        values = evaluate(f, x)
        winner = int(np.argmin(values))
        if values[winner] < best_f:
            best_x, best_f = x[winner].copy(), float(values[winner])
        trace.append(best_f)
        if step % cycle == 0:
            order = np.argsort(values, kind="stable")
            worst = order[::-1][:replaced]
            noise = rng.normal(0.0, noise_fraction * f.width, size=(replaced, f.dim))
            x[worst] = _clip(f, x[order[0]] + noise)
    return best_x, best_f, trace


def run_function_trials(f: BenchmarkFunction, seeds: list[int], learning_rate: float = 0.01,
                        steps: int = 20000, cycle: int = 1000, population: int = 64,
                        u_inverse: float = 0.25) -> pd.DataFrame:
    """Run every variant once per seed; one row per (seed, variant).

    All three variants start from the same first uniform draw of the seed.
    """
    rows = []
    for seed in seeds:
        start = np.random.default_rng(seed).uniform(*f.domain, size=f.dim)
        outcomes = {
            "gd": gd_minimize(f, start, learning_rate, steps),
            "gd_restart": gd_restart(f, learning_rate, steps, cycle, np.random.default_rng(seed)),
            "hybrid": hybrid_gd_es(f, population, learning_rate, steps, cycle, u_inverse,
                                   np.random.default_rng(seed))[:2],
        }
        for variant, (x_star, f_star) in outcomes.items():
            rows.append({
                "seed": seed,
                "variant": variant,
                "f_star": f_star,
                "x_star": json.dumps([round(float(v), 10) for v in x_star]),
                "success": is_success(f, x_star),
            })
        logger.debug("Trial seed {} done", seed)
    return pd.DataFrame(rows, columns=["seed", "variant", "f_star", "x_star", "success"])


def success_counts(trials: pd.DataFrame) -> dict[str, int]:
    """Global-minimum count per variant."""
    counts = trials.groupby("variant")["success"].sum()
    return {variant: int(counts.get(variant, 0)) for variant in VARIANTS}


def write_trials(trials: pd.DataFrame, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    trials.to_csv(path, index=False)
    return path
