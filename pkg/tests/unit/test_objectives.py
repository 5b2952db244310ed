"""Unit tests for hard and relaxed energies."""

import itertools

import numpy as np
import pytest

from src.gso_solver.exceptions import InvalidSpecError
from src.gso_solver.models.config import ObjectiveKind, ObjectiveSpec
from src.gso_solver.models.graph import SkInstance
from src.gso_solver.services import objectives
from src.gso_solver.services.graph_service import generate_sk, graph_from_edges
from src.gso_solver.services.oracle import exhaustive_minimum
from src.gso_solver.services.relaxation import one_hot

MODULARITY = ObjectiveSpec(kind=ObjectiveKind.MODULARITY, n_states=2)
SK = ObjectiveSpec(kind=ObjectiveKind.SK)
MIS = ObjectiveSpec(kind=ObjectiveKind.MIS)
MVC = ObjectiveSpec(kind=ObjectiveKind.MVC)


def _scripted_modularity(graph, labels):
    """Direct double sum over ordered node pairs."""
    m = graph.edge_count
    adjacency = graph.adjacency_matrix.toarray()
    total = 0.0
    for i in range(graph.n):
        for j in range(graph.n):
            if labels[i] == labels[j]:
                total += adjacency[i, j] - graph.degrees[i] * graph.degrees[j] / (2.0 * m)
    return total / (2.0 * m)


@pytest.mark.unit
class TestHardEnergy:
    """Hand-checked energies."""

    def test_single_community_has_zero_modularity(self, karate):
        report = objectives.hard_energy(MODULARITY, karate, np.zeros(karate.n, dtype=np.int64))

        assert report.energy == pytest.approx(0.0, abs=1e-12)
        assert report.feasible

    def test_two_triangles_split(self, two_triangles):
        labels = np.array([0, 0, 0, 1, 1, 1])

        report = objectives.hard_energy(MODULARITY, two_triangles, labels)

        assert report.derived_metric == pytest.approx(0.5)
        assert report.derived_metric == pytest.approx(_scripted_modularity(two_triangles, labels))

    def test_modularity_matches_scripted_sum(self, karate):
        spec = ObjectiveSpec(kind=ObjectiveKind.MODULARITY, n_states=4)
        rng = np.random.default_rng(5)
        for _ in range(5):
            labels = rng.integers(0, 4, size=karate.n)
            q = objectives.derived_metric(spec, karate, labels)
            assert q == pytest.approx(_scripted_modularity(karate, labels), abs=1e-12)
            assert -1.0 <= q <= 1.0

    def test_sk_two_spins(self):
        sk = SkInstance(n=2, couplings=np.array([0.7]))

        assert objectives.hard_energy(SK, sk, np.array([1, 1])).energy == pytest.approx(-0.7)
        assert objectives.hard_energy(SK, sk, np.array([0, 1])).energy == pytest.approx(0.7)

    def test_sk_metric_is_per_spin(self, small_sk):
        labels = np.array([1, 0, 1, 1, 0, 0, 1, 0])
        report = objectives.hard_energy(SK, small_sk, labels)

        assert report.derived_metric == pytest.approx(report.energy / 8)

    def test_mis_triangle(self, triangle):
        assert objectives.hard_energy(MIS, triangle, np.array([1, 1, 1])).energy == 6.0
        assert objectives.hard_energy(MIS, triangle, np.array([0, 1, 0])).energy == -1.0

    def test_mvc_triangle(self, triangle):
        assert objectives.hard_energy(MVC, triangle, np.array([0, 0, 0])).energy == 9.0
        assert objectives.hard_energy(MVC, triangle, np.array([1, 1, 1])).energy == 3.0

    def test_batched_matches_rows(self, small_sk):
        labels = np.random.default_rng(1).integers(0, 2, size=(6, 8))

        batched = objectives.hard_energies(SK, small_sk, labels)

        assert batched.shape == (6,)
        for row, energy in zip(labels, batched):
            assert objectives.hard_energy(SK, small_sk, row).energy == pytest.approx(energy)

    def test_label_out_of_range(self, triangle):
        with pytest.raises(InvalidSpecError):
            objectives.hard_energy(MIS, triangle, np.array([0, 2, 0]))

    def test_wrong_problem_type(self, triangle, small_sk):
        with pytest.raises(InvalidSpecError):
            objectives.hard_energy(SK, triangle, np.array([0, 1, 0]))
        with pytest.raises(InvalidSpecError):
            objectives.hard_energy(MIS, small_sk, np.zeros(8, dtype=np.int64))

    def test_wrong_length(self, triangle):
        with pytest.raises(InvalidSpecError):
            objectives.hard_energy(MIS, triangle, np.array([0, 1]))


@pytest.mark.unit
class TestFeasibility:

    def test_mis(self, triangle):
        assert objectives.is_feasible(MIS, triangle, np.array([1, 0, 0]))
        assert not objectives.is_feasible(MIS, triangle, np.array([1, 1, 0]))
        assert objectives.is_feasible(MIS, triangle, np.array([0, 0, 0]))

    def test_mvc(self, triangle):
        assert objectives.is_feasible(MVC, triangle, np.array([1, 1, 0]))
        assert not objectives.is_feasible(MVC, triangle, np.array([1, 0, 0]))

    def test_unconstrained_objectives_rejected(self, triangle):
        with pytest.raises(InvalidSpecError):
            objectives.is_feasible(MODULARITY, triangle, np.array([0, 1, 0]))

    def test_mask_marks_violations(self, path3):
        labels = np.array([[1, 0, 1], [1, 1, 0], [0, 0, 0]])

        assert objectives.feasibility_mask(MIS, path3, labels).tolist() == [True, False, True]
        assert objectives.feasibility_mask(MVC, path3, labels).tolist() == [True, True, False]

    def test_penalty_always_admits_an_improving_flip(self, random_suite):
        for spec in (MIS, MVC):
            for graph in random_suite[:12]:
                if graph.n > 8:
                    continue
                states = np.array(list(itertools.product((0, 1), repeat=graph.n)), dtype=np.int64)
                energies = objectives.hard_energies(spec, graph, states)
                infeasible = ~objectives.feasibility_mask(spec, graph, states)
                for state, energy in zip(states[infeasible], energies[infeasible]):
                    flipped = np.tile(state, (graph.n, 1))
                    flipped[np.arange(graph.n), np.arange(graph.n)] ^= 1
                    assert objectives.hard_energies(spec, graph, flipped).min() < energy


@pytest.mark.unit
class TestSoftEnergy:

    @pytest.mark.parametrize("kind", list(ObjectiveKind))
    def test_matches_hard_energy_at_one_hot(self, kind, specs, karate):
        spec = specs[kind]
        problem = generate_sk(20, seed=1) if kind == ObjectiveKind.SK else karate
        labels = np.random.default_rng(3).integers(0, spec.n_states, size=(200, problem.n))

        soft = objectives.soft_energy(spec, problem, one_hot(labels, spec.n_states))
        hard = objectives.hard_energies(spec, problem, labels)

        np.testing.assert_allclose(soft, hard, atol=1e-9)

    def test_single_row_returns_float(self, triangle):
        value = objectives.soft_energy(MIS, triangle, one_hot(np.array([1, 0, 0]), 2))

        assert isinstance(value, float)
        assert value == -1.0

    def test_sk_uniform_is_zero(self, small_sk):
        uniform = np.full((8, 2), 0.5)

        assert objectives.soft_energy(SK, small_sk, uniform) == pytest.approx(0.0)
        assert np.allclose(objectives.soft_energy_grad(SK, small_sk, uniform), 0.0)

    def test_modularity_uniform_is_zero(self, karate):
        spec = ObjectiveSpec(kind=ObjectiveKind.MODULARITY, n_states=4)

        assert objectives.soft_energy(spec, karate, np.full((karate.n, 4), 0.25)) == pytest.approx(0.0, abs=1e-12)

    def test_mis_isolated_node_gradient(self):
        graph = graph_from_edges(3, [(0, 1)])
        rng = np.random.default_rng(0)
        for _ in range(5):
            p_hat = rng.dirichlet(np.ones(2), size=3)
            assert objectives.soft_energy_grad(MIS, graph, p_hat)[2, 1] == pytest.approx(-1.0)

    @pytest.mark.parametrize("kind", list(ObjectiveKind))
    def test_gradient_matches_central_differences(self, kind, specs, small_graph):
        spec = specs[kind]
        problem = generate_sk(6, seed=8) if kind == ObjectiveKind.SK else small_graph
        p_hat = np.random.default_rng(2).dirichlet(np.ones(spec.n_states), size=(3, problem.n))
        eps = 1e-6

        analytic = objectives.soft_energy_grad(spec, problem, p_hat)
        numeric = np.zeros_like(p_hat)
        for index in np.ndindex(p_hat.shape):
            up, down = p_hat.copy(), p_hat.copy()
            up[index] += eps
            down[index] -= eps
            numeric[index] = (np.sum(objectives.soft_energy(spec, problem, up))
                              - np.sum(objectives.soft_energy(spec, problem, down))) / (2 * eps)

        np.testing.assert_allclose(analytic, numeric, rtol=1e-4, atol=1e-7)


@pytest.mark.unit
class TestExhaustiveMinimum:

    def test_triangle_mis_and_mvc(self, triangle):
        energy, labels = exhaustive_minimum(MIS, triangle)
        assert energy == -1.0
        assert labels.tolist() == [0, 0, 1]

        energy, labels = exhaustive_minimum(MVC, triangle)
        assert energy == 2.0
        assert objectives.is_feasible(MVC, triangle, labels)

    def test_path_mis(self, path3):
        energy, labels = exhaustive_minimum(MIS, path3)

        assert energy == -2.0
        assert labels.tolist() == [1, 0, 1]

    def test_two_triangles_modularity(self, two_triangles):
        energy, labels = exhaustive_minimum(MODULARITY, two_triangles)

        assert energy == pytest.approx(-0.5)
        assert labels[0] == labels[1] == labels[2] != labels[3]

    def test_minimum_is_not_beaten_by_any_state(self, random_suite):
        for graph in random_suite[:10]:
            energy, _ = exhaustive_minimum(MIS, graph)
            states = np.array(list(itertools.product((0, 1), repeat=graph.n)), dtype=np.int64)
            feasible = objectives.feasibility_mask(MIS, graph, states)
            assert objectives.hard_energies(MIS, graph, states)[feasible].min() == pytest.approx(energy)
