"""
Tiered synchronization architecture.
Handles the degree-of-resilience metric, the 4-node group plan with
representatives promoted tier by tier, and top-down group-wise
synchronization over the resulting NCS graph.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Any, Dict, List, Tuple

from synchronization.exceptions import InvalidGraphError, NcsError
from synchronization.services.bounds import edge_count_lower_bound, tight_bound_complete
from synchronization.services.graph_core import Edge, NcsGraph
from synchronization.services.linsys import MeasurementSet, NcsSolution, Number
from synchronization.services.solvers import DEFAULT_ETA, SolveMode, ncs_fast

logger = logging.getLogger(__name__)

GROUP_SIZE = 4


def degree_of_resilience(k: int, edge_count: int) -> Fraction:
    """DoR = k / |E| as an exact rational."""
    if edge_count <= 0:
        raise NcsError(f"Edge count must be positive, got {edge_count}")
    return Fraction(k, edge_count)


@dataclass(frozen=True)
class DorCandidate:
    n: int
    k: int
    lower_bound: int
    dor: Fraction


def dor_upper_bound_table(lo: int, hi: int) -> List[DorCandidate]:
    """
    Upper bound of the DoR for every n in [lo, hi] and every 1 <= k <= floor(n/2)-1,
    using the edge-count lower bound as the denominator.
    """
    rows = []
    for n in range(lo, hi + 1):
        for k in range(1, tight_bound_complete(n) + 1):
            lower_bound = edge_count_lower_bound(n, k)
            rows.append(DorCandidate(n, k, lower_bound, degree_of_resilience(k, lower_bound)))
    return rows


def max_dor_network(lo: int, hi: int) -> DorCandidate:
    """
    Network size and resilience with the highest DoR upper bound in [lo, hi].

    Ties keep the smaller n, then the smaller k.

    Raises:
        NcsError: If lo < 4 or the range is empty
    """
    if lo < 4 or hi < lo:
        raise NcsError(f"DoR search needs 4 <= lo <= hi, got [{lo}, {hi}]")
    return max(dor_upper_bound_table(lo, hi), key=lambda row: (row.dor, -row.n, -row.k))


@dataclass(frozen=True)
class SyncGroup:
    members: Tuple[int, ...]
    tier: int

    @property
    def representative(self) -> int:
        return self.members[0]

    @property
    def edges(self) -> Tuple[Edge, ...]:
        return tuple(Edge(a, b) for a, b in combinations(self.members, 2))


@dataclass(frozen=True)
class TierPlan:
    node_count: int
    tiers: Tuple[Tuple[SyncGroup, ...], ...]
    per_group_resilience: int = 1

    @property
    def groups(self) -> List[SyncGroup]:
        return [group for tier in self.tiers for group in tier]

    @property
    def total_edges(self) -> int:
        return sum(len(group.edges) for group in self.groups)

    @property
    def flat_lower_bound(self) -> int:
        """Edge lower bound of a flat graph tolerating one fault per group."""
        return edge_count_lower_bound(self.node_count, len(self.groups))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'flat_lower_bound': self.flat_lower_bound,
            'group_count': len(self.groups),
            'nodes': self.node_count,
            'per_group_resilience': self.per_group_resilience,
            'tiers': [
                [{'members': list(g.members), 'representative': g.representative} for g in tier]
                for tier in self.tiers
            ],
            'total_edges': self.total_edges,
        }


def _partition(nodes: List[int]) -> List[Tuple[int, ...]]:
    """Consecutive groups of four; the last group absorbs a remainder of 1-3 nodes."""
    count = len(nodes) // GROUP_SIZE
    groups = [tuple(nodes[i * GROUP_SIZE:(i + 1) * GROUP_SIZE]) for i in range(count)]
    remainder = nodes[count * GROUP_SIZE:]
    if remainder:
        groups[-1] = groups[-1] + tuple(remainder)
    return groups


def build_tiered_plan(n: int) -> TierPlan:
    """
    Group nodes into 4-node synchronization groups and promote each group's
    lowest node to the tier above until a single group remains.

    An upper tier with only 2 or 3 representatives is padded to four with
    the lowest non-representative nodes of the tier below, taken round-robin
    across its groups. Sessions among a padded tier's members that were
    already measured in a lower group appear in both groups.

    Raises:
        InvalidGraphError: If n < 4
    """
    if n < GROUP_SIZE:
        raise InvalidGraphError(f"Tiered plans need at least {GROUP_SIZE} nodes, got {n}")

    tiers: List[Tuple[SyncGroup, ...]] = []
    current = list(range(n))
    tier = 1
    while True:
        groups = tuple(SyncGroup(members, tier) for members in _partition(current))
        tiers.append(groups)
        if len(groups) == 1:
            break
        representatives = [g.representative for g in groups]
        if len(representatives) < GROUP_SIZE:
            # Round-robin over the lower groups, lowest spare member first
            by_group = [list(g.members[1:]) for g in groups]
            padding = []
            while len(representatives) + len(padding) < GROUP_SIZE:
                for members in by_group:
                    if members and len(representatives) + len(padding) < GROUP_SIZE:
                        padding.append(members.pop(0))
            representatives = sorted(representatives + padding)
            logger.debug("Tier %d padded with %s", tier + 1, padding)
        current = representatives
        tier += 1

    plan = TierPlan(n, tuple(tiers))
    logger.debug("Tiered plan for %d nodes: %d tiers, %d groups", n, len(tiers), len(plan.groups))
    return plan


def tier_graph(plan: TierPlan) -> NcsGraph:
    """Union of every group's complete internal graph."""
    edges = {edge for group in plan.groups for edge in group.edges}
    return NcsGraph(plan.node_count, frozenset(edges))


def synchronize_tiered(
    plan: TierPlan, measurements: MeasurementSet, eta: float = DEFAULT_ETA
) -> NcsSolution:
    """
    Top-down group-wise synchronization: the top group runs first with the
    reference node as its representative; every lower group is solved
    relative to its representative, whose offset is already known.

    Padding members share their sessions between two groups, so a fault on
    such a session counts against both. One fault per lower group can then
    leave two faults in the padded group and an ambiguous vote.

    Args:
        plan: Tier plan
        measurements: One round over ``tier_graph(plan)``
        eta: Residual threshold passed to each group solve for float rounds

    Returns:
        NcsSolution with all N-1 offsets and the union of detected faults

    Raises:
        AmbiguousVoteError: If an exact group vote ties
    """
    measurements.validate_against(tier_graph(plan))
    known: Dict[int, Number] = {0: Fraction(0) if measurements.exact else 0.0}
    faults: Dict[Edge, Number] = {}

    for tier in reversed(plan.tiers):
        for group in tier:
            members = group.members
            local = {node: i for i, node in enumerate(members)}
            local_graph = NcsGraph(
                len(members), frozenset(Edge(local[e.a], local[e.b]) for e in group.edges)
            )
            local_measurements = MeasurementSet(
                {Edge(local[e.a], local[e.b]): measurements.value(e) for e in group.edges}
            )
            mode = SolveMode.EXACT if measurements.exact else SolveMode.NOISY
            result = ncs_fast(local_graph, local_measurements, mode=mode, eta=eta)
            base = known[group.representative]
            for node, offset in zip(members[1:], result.offsets):
                known.setdefault(node, base + offset)
            for edge, value in result.fault_estimates.items():
                faults[Edge(members[edge.a], members[edge.b])] = value

    offsets = tuple(known[node] for node in range(1, plan.node_count))
    return NcsSolution(offsets, faults)
