"""First-order parameter updates over a replica population."""

from typing import Optional

import numpy as np
import numpy.typing as npt

from ..models.config import GsoConfig


class SgdOptimizer:
    """Plain gradient descent: theta <- theta - lr * grad."""

    def __init__(self, learning_rate: float):
        self.learning_rate = learning_rate

    def step(self, params: npt.NDArray[np.float64], grad: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return params - self.learning_rate * grad

    def reset(self, replicas: Optional[npt.NDArray[np.int64]] = None) -> None:
        """Stateless; kept for interface parity with AdamOptimizer."""


class AdamOptimizer:
    """Adam with moment estimates and step counts kept per replica.

    Replicas whose parameters jump (substitution, GA phase) get their
    moments cleared through `reset`.
    """

    def __init__(self, learning_rate: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m: Optional[npt.NDArray[np.float64]] = None
        self.v: Optional[npt.NDArray[np.float64]] = None
        self.t: Optional[npt.NDArray[np.int64]] = None

    def step(self, params: npt.NDArray[np.float64], grad: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        if self.m is None:
            self.m = np.zeros_like(params)
            self.v = np.zeros_like(params)
            self.t = np.zeros(params.shape[0], dtype=np.int64)
        self.t += 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * grad * grad
        # broadcast per-replica step counts over node and state axes
        t = self.t.reshape((-1,) + (1,) * (params.ndim - 1))
        m_hat = self.m / (1.0 - self.beta1 ** t)
        v_hat = self.v / (1.0 - self.beta2 ** t)
        return params - self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)

    def reset(self, replicas: Optional[npt.NDArray[np.int64]] = None) -> None:
        """Clear moments for the given replicas, or for all of them."""
        if self.m is None:
            return
        if replicas is None:
            self.m = None
            self.v = None
            self.t = None
            return
        self.m[replicas] = 0.0
        self.v[replicas] = 0.0
        self.t[replicas] = 0


def make_optimizer(config: GsoConfig) -> SgdOptimizer | AdamOptimizer:
    if config.optimizer == "adam":
        return AdamOptimizer(config.learning_rate, config.adam_beta1, config.adam_beta2, config.adam_eps)
    return SgdOptimizer(config.learning_rate)
