"""Energies of the four graph problems in hard and relaxed form.

Every energy is minimized: modularity is handled as E = -Q. Batched
functions accept a leading replica axis; the single-row operations are
thin wrappers around them.
"""

import numpy as np
import numpy.typing as npt

from ..exceptions import InvalidSpecError
from ..models.config import ObjectiveKind, ObjectiveSpec
from ..models.graph import Graph, HardAssignment, Problem, SkInstance, SoftAssignment
from ..models.result import EnergyReport


def _check_problem(spec: ObjectiveSpec, problem: Problem) -> None:
    if spec.kind == ObjectiveKind.SK:
        if not isinstance(problem, SkInstance):
            raise InvalidSpecError("the sk objective needs an SkInstance")
    elif not isinstance(problem, Graph):
        raise InvalidSpecError(f"the {spec.kind.value} objective needs a Graph")
    elif spec.kind == ObjectiveKind.MODULARITY and problem.edge_count == 0:
        raise InvalidSpecError("modularity is undefined on a graph without edges")


def _check_labels(spec: ObjectiveSpec, problem: Problem, labels: HardAssignment) -> None:
    if labels.shape[-1] != problem.n:
        raise InvalidSpecError(f"expected {problem.n} labels per row, got {labels.shape[-1]}")
    if labels.size and (labels.min() < 0 or labels.max() >= spec.n_states):
        raise InvalidSpecError(f"labels must lie in 0..{spec.n_states - 1}")


def _neighbor_sum(graph: Graph, values: npt.NDArray[np.float64], node_axis: int) -> npt.NDArray[np.float64]:
    """Sum of `values` over each node's neighbors along `node_axis`."""
    moved = np.moveaxis(values, node_axis, 0)
    flat = moved.reshape(graph.n, -1)
    summed = np.asarray(graph.adjacency_matrix @ flat).reshape(moved.shape)
    return np.moveaxis(summed, 0, node_axis)


# hard energies (batched over the leading axis)

def _modularity_q(graph: Graph, labels: HardAssignment, n_states: int) -> npt.NDArray[np.float64]:
    m = graph.edge_count
    u, v = graph.edges[:, 0], graph.edges[:, 1]
    intra = np.sum(labels[..., u] == labels[..., v], axis=-1)
    onehot = np.eye(n_states)[labels]
    degree_sums = np.einsum("...nk,n->...k", onehot, graph.degrees.astype(np.float64))
    return intra / m - np.sum((degree_sums / (2.0 * m)) ** 2, axis=-1)


def _sk_hard(sk: SkInstance, labels: HardAssignment) -> npt.NDArray[np.float64]:
    sigma = 2.0 * labels - 1.0
    return -0.5 * np.sum(sk.local_fields(sigma) * sigma, axis=-1)


def violation_count(spec: ObjectiveSpec, graph: Graph, labels: HardAssignment) -> npt.NDArray[np.int64]:
    """Violated edges: both ends selected (mis) or neither end selected (mvc)."""
    x_u = labels[..., graph.edges[:, 0]]
    x_v = labels[..., graph.edges[:, 1]]
    if spec.kind == ObjectiveKind.MIS:
        return np.sum(x_u * x_v, axis=-1)
    return np.sum((1 - x_u) * (1 - x_v), axis=-1)


def hard_energies(spec: ObjectiveSpec, problem: Problem, labels: HardAssignment) -> npt.NDArray[np.float64]:
    """Exact energies of a stack of label rows, shape (..., N) -> (...)."""
    _check_problem(spec, problem)
    labels = np.asarray(labels, dtype=np.int64)
    _check_labels(spec, problem, labels)
    if spec.kind == ObjectiveKind.MODULARITY:
        return -_modularity_q(problem, labels, spec.n_states)
    if spec.kind == ObjectiveKind.SK:
        return _sk_hard(problem, labels)
    selected = np.sum(labels, axis=-1).astype(np.float64)
    penalty = spec.alpha * violation_count(spec, problem, labels)
    if spec.kind == ObjectiveKind.MIS:
        return -selected + penalty
    return selected + penalty


def feasibility_mask(spec: ObjectiveSpec, problem: Problem, labels: HardAssignment) -> npt.NDArray[np.bool_]:
    """Per-row feasibility; unconstrained objectives are always feasible."""
    labels = np.asarray(labels, dtype=np.int64)
    if not spec.is_constrained:
        return np.ones(labels.shape[:-1], dtype=bool)
    return violation_count(spec, problem, labels) == 0


def metric_from_energy(spec: ObjectiveSpec, problem: Problem, energy: float,
                       labels: HardAssignment) -> float:
    if spec.kind == ObjectiveKind.MODULARITY:
        return -float(energy)
    if spec.kind == ObjectiveKind.SK:
        return float(energy) / problem.n
    return float(np.sum(labels))


def hard_energy(spec: ObjectiveSpec, problem: Problem, labels: HardAssignment) -> EnergyReport:
    """Exact energy, feasibility and reported metric of one assignment."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.ndim != 1:
        raise InvalidSpecError("hard_energy takes a single assignment row")
    energy = float(hard_energies(spec, problem, labels))
    feasible = bool(feasibility_mask(spec, problem, labels))
    return EnergyReport(
        energy=energy,
        feasible=feasible,
        derived_metric=metric_from_energy(spec, problem, energy, labels),
    )


def is_feasible(spec: ObjectiveSpec, graph: Graph, labels: HardAssignment) -> bool:
    """Independence (mis) or cover (mvc) check of one assignment."""
    if not spec.is_constrained:
        raise InvalidSpecError(f"feasibility is only defined for mis and mvc, not {spec.kind.value}")
    _check_problem(spec, graph)
    labels = np.asarray(labels, dtype=np.int64)
    _check_labels(spec, graph, labels)
    return bool(feasibility_mask(spec, graph, labels))


def derived_metric(spec: ObjectiveSpec, problem: Problem, labels: HardAssignment) -> float:
    """Q for modularity, E/N for sk, subset size for mis/mvc."""
    return hard_energy(spec, problem, labels).derived_metric


# relaxed energies

def soft_energy(spec: ObjectiveSpec, problem: Problem, p_hat: SoftAssignment) -> npt.NDArray[np.float64] | float:
    """Energy with node indicators replaced by relaxed sample entries.

    p_hat has shape (N, K) or (B, N, K); the result has the leading shape.
    """
    _check_problem(spec, problem)
    p_hat = np.asarray(p_hat, dtype=np.float64)
    if spec.kind == ObjectiveKind.MODULARITY:
        m = problem.edge_count
        neighbor = _neighbor_sum(problem, p_hat, -2)
        edge_term = 0.5 * np.sum(p_hat * neighbor, axis=(-2, -1)) / m
        degree_sums = np.einsum("...nk,n->...k", p_hat, problem.degrees.astype(np.float64))
        energy = -(edge_term - np.sum((degree_sums / (2.0 * m)) ** 2, axis=-1))
    elif spec.kind == ObjectiveKind.SK:
        magnet = p_hat[..., 1] - p_hat[..., 0]
        energy = -0.5 * np.sum(problem.local_fields(magnet) * magnet, axis=-1)
    else:
        x = p_hat[..., 1]
        if spec.kind == ObjectiveKind.MIS:
            energy = -np.sum(x, axis=-1) + spec.alpha * 0.5 * np.sum(x * _neighbor_sum(problem, x, -1), axis=-1)
        else:
            y = 1.0 - x
            energy = np.sum(x, axis=-1) + spec.alpha * 0.5 * np.sum(y * _neighbor_sum(problem, y, -1), axis=-1)
    return float(energy) if np.ndim(energy) == 0 else energy


def soft_energy_grad(spec: ObjectiveSpec, problem: Problem, p_hat: SoftAssignment) -> npt.NDArray[np.float64]:
    """Analytic dE/dp_hat with the shape of p_hat.

    With a leading replica axis this is the gradient of the summed energy,
    which leaves each replica's slice equal to its own gradient.
    """
    _check_problem(spec, problem)
    p_hat = np.asarray(p_hat, dtype=np.float64)
    grad = np.zeros_like(p_hat)
    if spec.kind == ObjectiveKind.MODULARITY:
        m = problem.edge_count
        degrees = problem.degrees.astype(np.float64)
        degree_sums = np.einsum("...nk,n->...k", p_hat, degrees)
        grad = -_neighbor_sum(problem, p_hat, -2) / m
        grad += degrees[:, None] * degree_sums[..., None, :] / (2.0 * m * m)
    elif spec.kind == ObjectiveKind.SK:
        magnet = p_hat[..., 1] - p_hat[..., 0]
        local = problem.local_fields(magnet)
        grad[..., 1] = -local
        grad[..., 0] = local
    elif spec.kind == ObjectiveKind.MIS:
        grad[..., 1] = -1.0 + spec.alpha * _neighbor_sum(problem, p_hat[..., 1], -1)
    else:
        grad[..., 1] = 1.0 - spec.alpha * _neighbor_sum(problem, 1.0 - p_hat[..., 1], -1)
    return grad
