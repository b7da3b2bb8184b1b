"""
Resilience bound service.
Handles the closed-form bound for complete graphs, the edge-connectivity
bound for arbitrary graphs, the combinatorial enumeration oracle and the
necessary conditions on degree and edge count.
"""
import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Any, Dict, FrozenSet

from synchronization.exceptions import DisconnectedGraphError, InvalidGraphError
from synchronization.services.graph_core import (
    Edge,
    NcsGraph,
    edge_connectivity,
    is_connected,
    is_connected_after_removal,
    minimum_global_cut,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ResilienceReport:
    tight_bound: int
    edge_connectivity: int
    witness_cut: FrozenSet[Edge]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'edge_connectivity': self.edge_connectivity,
            'tight_bound': self.tight_bound,
            'witness_cut': [e.as_list() for e in sorted(self.witness_cut)],
        }


def tight_bound_complete(n: int) -> int:
    """
    Tight bound of maximum resilience of the complete graph on n nodes.

    Raises:
        InvalidGraphError: If n < 2
    """
    if n < 2:
        raise InvalidGraphError(f"Complete-graph bound needs n >= 2, got {n}")
    return n // 2 - 1


def bound_from_connectivity(connectivity: int) -> int:
    """Largest K with 2K+1 <= lambda."""
    return (connectivity - 1) // 2


def tight_bound(g: NcsGraph) -> ResilienceReport:
    """
    Compute the tight bound from the edge connectivity.

    Args:
        g: Connected NCS graph with at least two nodes

    Returns:
        ResilienceReport whose witness cut is a minimum global cut

    Raises:
        DisconnectedGraphError: If g is disconnected
    """
    connectivity, cut = minimum_global_cut(g)
    if connectivity == 0:
        raise DisconnectedGraphError("Tight bound is undefined for a disconnected graph")
    report = ResilienceReport(bound_from_connectivity(connectivity), connectivity, cut)
    logger.debug("tight_bound: lambda=%d K*=%d", connectivity, report.tight_bound)
    return report


def tight_bound_enumeration_oracle(g: NcsGraph) -> int:
    """
    Combinatorial bound: for K = 0, 1, ... remove every set of 2K edges and
    return K-1 at the first removal that disconnects the graph.

    Only practical for small edge sets.

    Raises:
        DisconnectedGraphError: If g is disconnected
    """
    if not is_connected(g):
        raise DisconnectedGraphError("Tight bound is undefined for a disconnected graph")
    edges = g.sorted_edges
    k = 1
    while 2 * k <= len(edges):
        for removed in combinations(edges, 2 * k):
            if not is_connected_after_removal(g, removed):
                return k - 1
        k += 1
    # Removing every edge always disconnects a graph with more than one node
    return k - 1


def k_resilient(g: NcsGraph, k: int) -> bool:
    """True iff g is (2k+1)-edge-connected."""
    if g.node_count < 2:
        return False
    return edge_connectivity(g) >= 2 * k + 1


def edge_count_lower_bound(n: int, k: int) -> int:
    """Necessary edge count ceil(n(2k+1)/2) for k-resilience on n nodes."""
    if n < 2:
        raise InvalidGraphError(f"Edge-count bound needs n >= 2, got {n}")
    return (n * (2 * k + 1) + 1) // 2


def min_degree_check(g: NcsGraph, k: int) -> bool:
    """Necessary condition: every node has degree >= 2k+1."""
    return g.min_degree() >= 2 * k + 1
