"""Mean-field relaxation: softmax parameterization, Gumbel-softmax sampling and its gradient."""

import numpy as np
import numpy.typing as npt
from scipy.special import softmax

from ..exceptions import InvalidTemperatureError
from ..models.config import ScheduleMode, TemperatureSchedule
from ..models.graph import HardAssignment, SoftAssignment

PROBABILITY_FLOOR = 1e-12
_EPS = np.finfo(np.float64).eps


def probabilities(theta: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """Row-wise softmax over the state axis.

    For two states this is sigmoid(theta_1 - theta_0), the sigmoid
    parameterization written per state.
    """
    return softmax(theta, axis=-1)


def gumbel_from_uniform(u: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Map Uniform(0, 1) draws to standard Gumbel draws."""
    u = np.clip(np.asarray(u, dtype=np.float64), _EPS, 1.0 - _EPS)
    return -np.log(-np.log(u))


def gumbel_noise(shape: tuple[int, ...], rng: np.random.Generator) -> npt.NDArray[np.float64]:
    """Standard Gumbel(0, 1) noise of the given shape."""
    return gumbel_from_uniform(rng.random(shape))


def _log_probabilities(p: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    return np.log(np.maximum(p, PROBABILITY_FLOOR))


def gumbel_softmax_sample(p: npt.NDArray[np.float64], g: npt.NDArray[np.float64],
                          tau: float) -> SoftAssignment:
    """Relaxed sample softmax((log p + g) / tau) along the last axis."""
    if not tau > 0:
        raise InvalidTemperatureError(f"temperature must be positive, got {tau}")
    return softmax((_log_probabilities(p) + g) / tau, axis=-1)


def temperature_at(schedule: TemperatureSchedule, step: int) -> float:
    """Temperature at `step`; steps outside the run are clamped to the endpoints."""
    last = schedule.total_steps - 1
    if schedule.mode == ScheduleMode.CONSTANT or last == 0:
        return schedule.tau_init
    fraction = min(max(step, 0), last) / last
    if schedule.mode == ScheduleMode.LINEAR:
        return schedule.tau_init + (schedule.tau_final - schedule.tau_init) * fraction
    return schedule.tau_init * (schedule.tau_final / schedule.tau_init) ** fraction


def hard_decode(p_hat: SoftAssignment) -> HardAssignment:
    """Argmax label per node; ties go to the lowest state index."""
    return np.argmax(p_hat, axis=-1).astype(np.int64)


def one_hot(labels: npt.ArrayLike, n_states: int) -> npt.NDArray[np.float64]:
    """One-hot rows for integer labels."""
    labels = np.asarray(labels, dtype=np.int64)
    return np.eye(n_states, dtype=np.float64)[labels]


def backprop_theta(dE_dphat: npt.NDArray[np.float64], p: npt.NDArray[np.float64],
                   g: npt.NDArray[np.float64], tau: float,
                   theta: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """Chain rule from dE/dp_hat back to the logits theta.

    z = (log p + g) / tau and p_hat = softmax(z); the softmax Jacobian is
    applied at z, scaled by 1/tau, then composed with d log p / d theta,
    which is (I - 1 p^T) wherever p sits above the probability floor.
    """
    if dE_dphat.shape != theta.shape or p.shape != theta.shape or g.shape != theta.shape:
        raise ValueError(f"shape mismatch: grad {dE_dphat.shape}, p {p.shape}, "
                         f"g {g.shape}, theta {theta.shape}")
    p_hat = gumbel_softmax_sample(p, g, tau)
    dE_dz = p_hat * (dE_dphat - np.sum(p_hat * dE_dphat, axis=-1, keepdims=True))
    dE_dlogp = dE_dz / tau
    # the floor makes log p constant below it
    dE_dlogp = np.where(p > PROBABILITY_FLOOR, dE_dlogp, 0.0)
    return dE_dlogp - p * np.sum(dE_dlogp, axis=-1, keepdims=True)
