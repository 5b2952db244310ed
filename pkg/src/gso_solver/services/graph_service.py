"""Graph and SK-instance construction: edge-list ingestion and synthetic generators."""

from collections.abc import Iterable
from pathlib import Path

import networkx as nx
import numpy as np
from loguru import logger

from ..exceptions import EmptyGraphError, GraphParseError, InvalidNodeError, InvalidSizeError
from ..models.graph import Graph, SkInstance

COMMENT_PREFIXES = ("#", "%")


def graph_from_edges(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Build a Graph from pairs over ids 0..n-1, dropping self-loops and duplicates."""
    pairs = set()
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise InvalidNodeError(f"edge ({u}, {v}) outside 0..{n - 1}")
        if u != v:
            pairs.add((min(u, v), max(u, v)))

    edge_array = np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2)
    neighbor_lists: list[list[int]] = [[] for _ in range(n)]
    for u, v in edge_array:
        neighbor_lists[u].append(int(v))
        neighbor_lists[v].append(int(u))
    adjacency = tuple(np.array(sorted(nbrs), dtype=np.int64) for nbrs in neighbor_lists)
    degrees = np.array([len(nbrs) for nbrs in neighbor_lists], dtype=np.int64)
    return Graph(n=n, edges=edge_array, adjacency=adjacency, degrees=degrees)


def load_edge_list(text: bytes | str) -> Graph:
    """Parse a whitespace-separated edge list.

    Node ids are relabeled 0..n-1 in order of first appearance. Blank lines
    and lines starting with '#' or '%' are skipped; self-loops and duplicate
    edges are dropped with a warning.
    """
    ids: dict[int, int] = {}
    seen: set[tuple[int, int]] = set()
    edges: list[tuple[int, int]] = []
    self_loops = 0
    duplicates = 0

    for line_number, raw in enumerate(text.splitlines(), 1):
        if isinstance(raw, bytes):
            try:
                raw = raw.decode("utf-8")
            except UnicodeDecodeError:
                raise GraphParseError(line_number, raw.decode("utf-8", errors="replace").strip(),
                                      "line is not valid UTF-8")
        line = raw.strip()
        if not line or line.startswith(COMMENT_PREFIXES):
            continue
        parts = line.split()
        if len(parts) < 2:
            raise GraphParseError(line_number, line, "expected two node ids")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(line_number, line, "node ids must be integers")

        u = ids.setdefault(a, len(ids))
        v = ids.setdefault(b, len(ids))
        if u == v:
            self_loops += 1
            continue
        key = (min(u, v), max(u, v))
        if key in seen:
            duplicates += 1
            continue
        seen.add(key)
        edges.append(key)

    if not edges:
        raise EmptyGraphError("edge list contains no edges")
    if self_loops or duplicates:
        logger.warning("Dropped {} self-loops and {} duplicate edges", self_loops, duplicates)

    graph = graph_from_edges(len(ids), edges)
    logger.debug("Loaded graph with {} nodes and {} edges", graph.n, graph.edge_count)
    return graph


def load_edge_list_file(path: str | Path) -> Graph:
    """Load an edge-list file from disk."""
    return load_edge_list(Path(path).read_bytes())


def from_networkx(nx_graph: nx.Graph) -> Graph:
    """Convert a networkx graph, relabeling nodes in iteration order."""
    index = {node: i for i, node in enumerate(nx_graph.nodes())}
    return graph_from_edges(len(index), ((index[u], index[v]) for u, v in nx_graph.edges()))


BUILTIN_GRAPHS = {
    "karate": nx.karate_club_graph,
}


def builtin_graph(name: str) -> Graph:
    """Return one of the small reference graphs shipped with networkx."""
    try:
        factory = BUILTIN_GRAPHS[name]
    except KeyError:
        raise InvalidSizeError(f"unknown builtin graph '{name}', choose from {sorted(BUILTIN_GRAPHS)}")
    return from_networkx(factory())


def random_graph(n: int, edge_probability: float, seed: int) -> Graph:
    """Seeded G(n, p) graph; isolated nodes are kept."""
    if n < 1:
        raise InvalidSizeError(f"graph needs at least one node, got {n}")
    return from_networkx(nx.gnp_random_graph(n, edge_probability, seed=seed))


def generate_sk(n: int, seed: int) -> SkInstance:
    """Draw SK couplings J_ij ~ Normal(0, 1/n) for i < j."""
    if n < 2:
        raise InvalidSizeError(f"SK instance needs n >= 2, got {n}")
    rng = np.random.default_rng(seed)
    count = n * (n - 1) // 2
    couplings = rng.normal(0.0, 1.0 / np.sqrt(n), size=count)
    return SkInstance(n=n, couplings=couplings)


def complement_set(graph: Graph, subset: Iterable[int]) -> set[int]:
    """Return V minus `subset`."""
    chosen = set()
    for node in subset:
        if not 0 <= node < graph.n:
            raise InvalidNodeError(f"node {node} outside 0..{graph.n - 1}")
        chosen.add(int(node))
    return set(range(graph.n)) - chosen
