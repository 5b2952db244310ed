"""Problem instance and population data models."""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import numpy.typing as npt
from scipy import sparse

# N_bs x N x K row-stochastic relaxed sample
SoftAssignment = npt.NDArray[np.float64]
# N_bs x N (or N) integer labels
HardAssignment = npt.NDArray[np.int64]

# coupling entries held at once when multiplying by J
ROW_BLOCK_ENTRIES = 1 << 22


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph with contiguous 0-based node ids.

    `edges` holds each edge once as (u, v) with u < v, sorted. `adjacency`
    holds the sorted neighbor list of every node.
    """
    n: int
    edges: npt.NDArray[np.int64]
    adjacency: tuple[npt.NDArray[np.int64], ...]
    degrees: npt.NDArray[np.int64]

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    @cached_property
    def adjacency_matrix(self) -> sparse.csr_matrix:
        """Symmetric 0/1 adjacency in CSR form."""
        rows = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        cols = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        data = np.ones(rows.shape[0], dtype=np.float64)
        return sparse.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    def neighbors(self, node: int) -> npt.NDArray[np.int64]:
        return self.adjacency[node]


@dataclass(frozen=True, eq=False)
class SkInstance:
    """Sherrington-Kirkpatrick couplings.

    `couplings` stores J_ij for i < j, flat and row-major, so entry
    (i, j) lives at position i*n - i*(i+1)/2 + (j - i - 1). The full
    matrix is never materialized.
    """
    n: int
    couplings: npt.NDArray[np.float64]

    def _row_start(self, i: int) -> int:
        return i * self.n - i * (i + 1) // 2

    def coupling(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        if i > j:
            i, j = j, i
        return float(self.couplings[self._row_start(i) + (j - i - 1)])

    def row(self, i: int) -> npt.NDArray[np.float64]:
        """Row i of the symmetric coupling matrix, zero on the diagonal."""
        out = np.zeros(self.n, dtype=np.float64)
        earlier = np.arange(i)
        out[:i] = self.couplings[earlier * self.n - earlier * (earlier + 1) // 2 + (i - earlier - 1)]
        start = self._row_start(i)
        out[i + 1:] = self.couplings[start:start + self.n - i - 1]
        return out

    def local_fields(self, x: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """J x along the last axis of `x`, built from the upper triangle in row blocks."""
        x = np.asarray(x, dtype=np.float64)
        fields = np.zeros_like(x)
        columns = np.arange(self.n)
        block = max(1, ROW_BLOCK_ENTRIES // self.n)
        for start in range(0, self.n - 1, block):
            stop = min(start + block, self.n - 1)
            upper = np.zeros((stop - start, self.n), dtype=np.float64)
            upper[columns > np.arange(start, stop)[:, None]] = \
                self.couplings[self._row_start(start):self._row_start(stop)]
            fields[..., start:stop] += x @ upper.T
            fields += x[..., start:stop] @ upper
        return fields


Problem = Graph | SkInstance


@dataclass
class ThetaPopulation:
    """Learnable logits of shape N_bs x N x K, one categorical per node and replica."""
    values: npt.NDArray[np.float64]

    def __post_init__(self):
        if self.values.ndim != 3:
            raise ValueError(f"theta must be 3-dimensional, got shape {self.values.shape}")

    @classmethod
    def initialize(cls, n_replicas: int, n_nodes: int, n_states: int,
                   rng: np.random.Generator) -> "ThetaPopulation":
        """Draw i.i.d. Normal(0, 1) logits."""
        return cls(rng.standard_normal((n_replicas, n_nodes, n_states)))

    @property
    def n_replicas(self) -> int:
        return self.values.shape[0]

    @property
    def n_nodes(self) -> int:
        return self.values.shape[1]

    @property
    def n_states(self) -> int:
        return self.values.shape[2]
