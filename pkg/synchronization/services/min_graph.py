"""
Minimum NCS graph synthesis.
Removes m = 0, 1, 2, ... edges from the complete graph, keeps the subgraphs
that stay K-resilient and returns the survivors of the largest m.
"""
import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, Iterator, List, Optional, Tuple

import networkx as nx

from synchronization.conf import get_setting
from synchronization.exceptions import InfeasibleResilienceError, InvalidGraphError
from synchronization.services.bounds import edge_count_lower_bound, k_resilient
from synchronization.services.graph_core import Edge, NcsGraph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MinGraphResult:
    graphs: Tuple[NcsGraph, ...]
    edge_count: int
    lower_bound: int
    survivor_count: int
    removed_edges: int
    isomorphism_classes: Optional[int] = None
    node_count: int = field(default=0)

    @property
    def achieves_lower_bound(self) -> bool:
        return self.edge_count == self.lower_bound

    def to_dict(self) -> Dict[str, Any]:
        payload = {
            'achieves_lower_bound': self.achieves_lower_bound,
            'edge_count': self.edge_count,
            'graphs': [
                {'nodes': g.node_count, 'edges': [e.as_list() for e in g.sorted_edges]}
                for g in self.graphs
            ],
            'lower_bound': self.lower_bound,
            'survivor_count': self.survivor_count,
        }
        if self.isomorphism_classes is not None:
            payload['isomorphism_classes'] = self.isomorphism_classes
        return payload


def _check_feasible(n: int, k: int) -> None:
    if n < 2:
        raise InvalidGraphError(f"Minimum graphs need n >= 2, got {n}")
    if k < 0:
        raise InvalidGraphError(f"Resilience must be non-negative, got {k}")
    if 2 * k + 1 > n - 1:
        raise InfeasibleResilienceError(
            f"K{n} is only {n - 1}-edge-connected; {k}-resilience needs {2 * k + 1}"
        )


def degree_feasible_removals(n: int, k: int, m: int) -> Iterator[Tuple[Edge, ...]]:
    """
    Yield, in lexicographic order, every set of m edges of K_n whose removal
    keeps all degrees >= 2k+1. Branches that already break the degree
    condition are never extended.
    """
    edges = NcsGraph.from_pairs(n, combinations(range(n), 2)).sorted_edges
    slack = [n - 1 - (2 * k + 1)] * n
    if m < 0 or sum(slack) < 2 * m:
        return

    chosen: List[Edge] = []

    def extend(start: int) -> Iterator[Tuple[Edge, ...]]:
        if len(chosen) == m:
            yield tuple(chosen)
            return
        remaining = m - len(chosen)
        if sum(slack) < 2 * remaining:
            return
        for index in range(start, len(edges) - remaining + 1):
            edge = edges[index]
            if slack[edge.a] == 0 or slack[edge.b] == 0:
                continue
            slack[edge.a] -= 1
            slack[edge.b] -= 1
            chosen.append(edge)
            yield from extend(index + 1)
            chosen.pop()
            slack[edge.a] += 1
            slack[edge.b] += 1

    yield from extend(0)


def _survivors(n: int, k: int, m: int, complete: NcsGraph) -> Iterator[NcsGraph]:
    for removed in degree_feasible_removals(n, k, m):
        candidate = complete.without_edges(removed)
        if k_resilient(candidate, k):
            yield candidate


def _dedup(graphs: List[NcsGraph]) -> List[NcsGraph]:
    """One representative (first seen) per isomorphism class."""
    buckets: Dict[str, List[Tuple[NcsGraph, nx.Graph]]] = {}
    representatives = []
    for g in graphs:
        nxg = g.to_networkx()
        key = nx.weisfeiler_lehman_graph_hash(nxg)
        bucket = buckets.setdefault(key, [])
        if any(nx.is_isomorphic(nxg, other) for _, other in bucket):
            continue
        bucket.append((g, nxg))
        representatives.append(g)
    return representatives


def minimum_ncs_graphs(
    n: int, k: int, limit: Optional[int] = None, dedup: bool = False
) -> MinGraphResult:
    """
    Synthesize minimum K-resilient NCS graphs on n nodes.

    Args:
        n: Number of nodes
        k: Target resilience
        limit: Maximum number of graphs returned (survivors are still counted)
        dedup: Keep one graph per isomorphism class

    Returns:
        MinGraphResult for the largest removal count with survivors

    Raises:
        InfeasibleResilienceError: If even K_n is not k-resilient
        InvalidGraphError: If n is outside the supported range
    """
    _check_feasible(n, k)
    max_nodes = get_setting('NCS_MIN_GRAPH_MAX_NODES')
    if n > max_nodes:
        raise InvalidGraphError(f"Minimum-graph search supports n <= {max_nodes}, got {n}")
    if limit is None:
        limit = get_setting('NCS_MIN_GRAPH_LIMIT')

    complete = NcsGraph.from_pairs(n, combinations(range(n), 2))
    lower_bound = edge_count_lower_bound(n, k)

    # Step 1: Walk m upward while at least one survivor exists
    m = 0
    while complete.edge_count - (m + 1) >= lower_bound:
        if next(_survivors(n, k, m + 1, complete), None) is None:
            break
        m += 1
    logger.debug("minimum_ncs_graphs(%d, %d): last level with survivors m=%d", n, k, m)

    # Step 2: Collect the full survivor set of the final level
    survivors = list(_survivors(n, k, m, complete))
    classes = None
    if dedup:
        survivors_kept = _dedup(survivors)
        classes = len(survivors_kept)
    else:
        survivors_kept = survivors

    return MinGraphResult(
        graphs=tuple(survivors_kept[:limit]),
        edge_count=complete.edge_count - m,
        lower_bound=lower_bound,
        survivor_count=len(survivors),
        removed_edges=m,
        isomorphism_classes=classes,
        node_count=n,
    )


def greedy_min_degree_construction(n: int, k: int) -> NcsGraph:
    """
    Construct a graph with ceil(n(2k+1)/2) edges and minimum degree 2k+1.

    Every node targets degree 2k+1; for odd n node 0 targets 2k+2. The
    lowest-degree unfinished node is repeatedly paired with the unfinished
    nodes of lowest degree until its target is met. The result is not
    checked for k-resilience.

    Raises:
        InfeasibleResilienceError: If 2k+1 > n-1
    """
    _check_feasible(n, k)
    target = [2 * k + 1] * n
    if n % 2 == 1:
        target[0] += 1
    degree = [0] * n
    done = [False] * n
    pairs: List[Tuple[int, int]] = []

    while not all(done):
        # Lowest current degree means largest remaining demand
        node = min((v for v in range(n) if not done[v]),
                   key=lambda v: (degree[v] - target[v], v))
        done[node] = True
        need = target[node] - degree[node]
        partners = sorted((v for v in range(n) if not done[v]),
                          key=lambda v: (degree[v] - target[v], v))[:need]
        if len(partners) < need:
            raise InfeasibleResilienceError(f"Degree sequence for n={n}, k={k} is not realizable")
        for partner in partners:
            pairs.append((node, partner))
            degree[node] += 1
            degree[partner] += 1

    return NcsGraph.from_pairs(n, pairs)
