"""
Graph catalog for demos and test corpora.
Standard families come from networkx generators; the reference catalog holds
incomplete graphs with known tight bounds and minimum K-resilient graphs.
"""
from typing import Dict, List, Tuple

import networkx as nx

from synchronization.exceptions import InvalidGraphError
from synchronization.services.graph_core import NcsGraph

# Incomplete graphs with known tight bounds: name -> (node_count, edges, tight bound)
SPARSE_GRAPHS: Dict[str, Tuple[int, List[Tuple[int, int]], int]] = {
    'sparse-5': (5, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 4), (3, 4), (2, 3)], 1),
    'sparse-6a': (6, [(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5),
                      (3, 4)], 1),
    'sparse-6b': (6, [(0, 2), (0, 1), (0, 4), (0, 5), (1, 2), (1, 3), (1, 5), (2, 3), (2, 5),
                      (2, 4), (3, 4), (3, 5), (4, 5)], 1),
    'sparse-7a': (7, [(0, 4), (0, 5), (0, 6), (1, 4), (1, 5), (1, 6), (2, 3), (2, 5), (2, 6),
                      (3, 4), (3, 6), (4, 5), (4, 6), (5, 6)], 1),
    'sparse-7b': (7, [(0, 2), (0, 3), (0, 4), (0, 5), (0, 6), (1, 2), (1, 3), (1, 4), (1, 5),
                      (1, 6), (2, 4), (2, 5), (2, 6), (3, 4), (3, 5), (3, 6), (4, 6), (5, 6),
                      (4, 5)], 2),
    # Node 2 needs a fifth session (2-5) for the listed bound of 2
    'sparse-8': (8, [(0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (0, 6), (0, 7), (1, 4), (1, 5),
                     (1, 6), (1, 7), (2, 3), (2, 4), (2, 7), (3, 4), (3, 5), (3, 6), (3, 7),
                     (4, 5), (4, 6), (4, 7), (5, 6), (5, 7), (6, 7), (2, 5)], 2),
}

# The 8-node graph without the restored 2-5 session; its bound is only 1
SPARSE_8_UNREPAIRED = (8, SPARSE_GRAPHS['sparse-8'][1][:-1])

# Minimum K-resilient graphs: name -> (node_count, edges, K)
MINIMUM_GRAPHS: Dict[str, Tuple[int, List[Tuple[int, int]], int]] = {
    'minimum-5-1': (5, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 4), (3, 4)], 1),
    'minimum-6-1': (6, [(a, b) for a in range(3) for b in range(3, 6)], 1),
    'minimum-6-2': (6, [(a, b) for a in range(6) for b in range(a + 1, 6)], 2),
    'minimum-7-1': (7, [(0, 4), (0, 5), (0, 6), (1, 4), (1, 5), (1, 6), (2, 3), (2, 5), (2, 6),
                        (3, 4), (3, 6)], 1),
    'minimum-7-2': (7, [(0, 2), (0, 3), (0, 4), (0, 5), (0, 6), (1, 2), (1, 3), (1, 4), (1, 5),
                        (1, 6), (2, 4), (2, 5), (2, 6), (3, 4), (3, 5), (3, 6), (4, 6), (5, 6)], 2),
    'minimum-8-3': (8, [(a, b) for a in range(8) for b in range(a + 1, 8)], 3),
}

FAMILIES = ('complete', 'star', 'cycle', 'path')


def complete_graph(n: int) -> NcsGraph:
    return NcsGraph.from_networkx(nx.complete_graph(n))


def star_graph(n: int) -> NcsGraph:
    """Star on n nodes centred at the reference node."""
    return NcsGraph.from_networkx(nx.star_graph(n - 1))


def cycle_graph(n: int) -> NcsGraph:
    return NcsGraph.from_networkx(nx.cycle_graph(n))


def path_graph(n: int) -> NcsGraph:
    return NcsGraph.from_networkx(nx.path_graph(n))


def family_graph(kind: str, n: int) -> NcsGraph:
    """
    Build a standard family member.

    Raises:
        InvalidGraphError: On an unknown family or too few nodes
    """
    builders = {
        'complete': complete_graph,
        'star': star_graph,
        'cycle': cycle_graph,
        'path': path_graph,
    }
    if kind not in builders:
        raise InvalidGraphError(f"Unknown graph family '{kind}', expected one of {FAMILIES}")
    if n < (3 if kind == 'cycle' else 1):
        raise InvalidGraphError(f"A {kind} graph needs more than {n} nodes")
    return builders[kind](n)


def named_graph(name: str) -> NcsGraph:
    """Look up a reference catalog graph by name."""
    table = {**SPARSE_GRAPHS, **MINIMUM_GRAPHS}
    if name not in table:
        raise InvalidGraphError(f"Unknown catalog graph '{name}', expected one of {sorted(table)}")
    node_count, edges, _ = table[name]
    return NcsGraph.from_pairs(node_count, edges)


def random_connected_graph(n: int, p: float, seed: int) -> NcsGraph:
    """
    Seeded Erdős–Rényi graph; retries with derived seeds until connected.
    """
    for attempt in range(1000):
        graph = nx.gnp_random_graph(n, p, seed=seed * 1000 + attempt)
        if n == 1 or nx.is_connected(graph):
            return NcsGraph.from_networkx(graph)
    raise InvalidGraphError(f"No connected G({n}, {p}) found for seed {seed}")


def graph_corpus(max_nodes: int = 6, random_count: int = 12, seed: int = 7) -> Dict[str, NcsGraph]:
    """
    Connected graphs for cross-checking bounds and solvers: families, catalog
    graphs and seeded random graphs with at most ``max_nodes`` nodes.
    """
    corpus: Dict[str, NcsGraph] = {}
    for n in range(2, max_nodes + 1):
        corpus[f'complete-{n}'] = complete_graph(n)
        corpus[f'star-{n}'] = star_graph(n)
        corpus[f'path-{n}'] = path_graph(n)
        if n >= 3:
            corpus[f'cycle-{n}'] = cycle_graph(n)
    for name in list(SPARSE_GRAPHS) + list(MINIMUM_GRAPHS):
        graph = named_graph(name)
        if graph.node_count <= max_nodes:
            corpus[name] = graph
    for i in range(random_count):
        n = 3 + i % max(1, max_nodes - 2)
        corpus[f'random-{i}'] = random_connected_graph(n, 0.6, seed + i)
    return corpus
