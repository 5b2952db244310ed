"""Pytest configuration and fixtures."""
import os
from pathlib import Path

import numpy as np
import pytest

from src.gso_solver.models.config import ObjectiveKind, ObjectiveSpec
from src.gso_solver.models.graph import SkInstance
from src.gso_solver.services.graph_service import builtin_graph, generate_sk, graph_from_edges, random_graph


@pytest.fixture
def triangle():
    return graph_from_edges(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def path3():
    """Path 0-1-2."""
    return graph_from_edges(3, [(0, 1), (1, 2)])


@pytest.fixture
def two_triangles():
    """Two disjoint triangles {0,1,2} and {3,4,5}."""
    return graph_from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])


@pytest.fixture
def small_graph():
    """Six nodes, a cycle with two chords and no isolated node."""
    return graph_from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5), (0, 3), (1, 4)])


@pytest.fixture
def karate():
    return builtin_graph("karate")


@pytest.fixture
def sk_pair():
    """Two spins with J_12 = 1."""
    return SkInstance(n=2, couplings=np.array([1.0]))


@pytest.fixture
def small_sk():
    return generate_sk(8, seed=7)


@pytest.fixture
def random_suite():
    """Fixed suite of G(n, p) graphs with 5 <= n <= 10."""
    return [random_graph(5 + i % 6, 0.4, seed=i) for i in range(30)]


@pytest.fixture
def specs():
    """One spec per objective kind."""
    return {
        ObjectiveKind.MODULARITY: ObjectiveSpec(kind=ObjectiveKind.MODULARITY, n_states=3),
        ObjectiveKind.SK: ObjectiveSpec(kind=ObjectiveKind.SK),
        ObjectiveKind.MIS: ObjectiveSpec(kind=ObjectiveKind.MIS),
        ObjectiveKind.MVC: ObjectiveSpec(kind=ObjectiveKind.MVC),
    }


@pytest.fixture
def data_dir():
    """Directory with the real-world edge lists; tests needing it are skipped without GSO_DATA_DIR."""
    path = os.getenv("GSO_DATA_DIR")
    if not path or not Path(path).is_dir():
        pytest.skip("GSO_DATA_DIR not set")
    return Path(path)


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    """Keep host GSO_* settings out of the tests."""
    for name in ("GSO_WORKERS", "GSO_OUT_DIR", "GSO_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
