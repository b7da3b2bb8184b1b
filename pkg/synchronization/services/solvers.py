"""
Fault-correcting synchronization solvers.
Handles the exhaustive distribution search (exact and noisy
variants), the fast edge-disjoint-path voting solver and fault
detection from estimated offsets.
"""
import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from synchronization.exceptions import (
    AmbiguousVoteError,
    DisconnectedGraphError,
    NoSolutionFound,
    RankDeficientError,
)
from synchronization.services.graph_core import (
    REFERENCE_NODE,
    Edge,
    NcsGraph,
    Path,
    is_connected,
    max_edge_disjoint_paths,
)
from synchronization.services.linsys import (
    FaultDistribution,
    LeastSquaresFit,
    MeasurementSet,
    NcsSolution,
    Number,
    least_squares_fit,
    residual_least_squares,
    solve_distribution,
)

logger = logging.getLogger(__name__)

DEFAULT_ETA = 2.0

# Largest number of suspect sessions the fast solver refits in noisy mode
NOISY_CANDIDATE_LIMIT = 12


class Algorithm(str, Enum):
    EXHAUSTIVE = 'exhaustive'
    FAST = 'fast'


class SolveMode(str, Enum):
    EXACT = 'exact'
    NOISY = 'noisy'


@dataclass(frozen=True)
class SyncResult:
    """Solver output: the solution plus search bookkeeping."""

    solution: NcsSolution
    algorithm: Algorithm
    iterations_examined: int
    assumed_distribution: Optional[FrozenSet[Edge]] = None
    mode: SolveMode = SolveMode.EXACT

    @property
    def offsets(self):
        return self.solution.offsets

    @property
    def fault_estimates(self) -> Dict[Edge, Number]:
        return self.solution.fault_estimates


def detect_faults(
    g: NcsGraph, m: MeasurementSet, offsets: Sequence[Number], tolerance: float = 0
) -> Dict[Edge, Number]:
    """
    Recover per-edge faults from estimated offsets.

    Args:
        g: NCS graph
        m: Measurements
        offsets: Estimated offsets of nodes 1..N-1
        tolerance: Defects with absolute value <= tolerance are treated as
            fault-free; 0 keeps every nonzero defect (exact mode)

    Returns:
        Map edge -> measured minus estimated pairwise offset, nonzero entries only
    """
    def offset(node: int) -> Number:
        return 0 if node == REFERENCE_NODE else offsets[node - 1]

    faults = {}
    for edge in g.sorted_edges:
        defect = m.value(edge) - (offset(edge.a) - offset(edge.b))
        if defect != 0 and abs(defect) > tolerance:
            faults[edge] = defect
    return faults


def chain_estimate(path: Path, m: MeasurementSet) -> Number:
    """
    Offset of ``path.sink`` obtained by substituting measurements along the path.

    A step u->v over edge (a, b): if u == a, offset(v) = offset(u) - m(a, b);
    otherwise offset(v) = offset(u) + m(a, b).
    """
    estimate: Number = Fraction(0) if m.exact else 0.0
    for u, v in path.steps:
        measured = m.value(Edge.of(u, v))
        estimate = estimate - measured if u < v else estimate + measured
    return estimate


def _exact_vote(node: int, candidates: List[Number]) -> Number:
    ranked = Counter(candidates).most_common()
    if len(ranked) > 1 and ranked[0][1] == ranked[1][1]:
        raise AmbiguousVoteError(
            f"Offset vote for node {node} is tied between {ranked[0][0]} and {ranked[1][0]} "
            f"({ranked[0][1]} paths each)"
        )
    return ranked[0][0]


def _noisy_vote(node: int, candidates: List[Number], eta: float) -> float:
    values = sorted(float(c) for c in candidates)
    clusters: List[List[float]] = []
    for value in values:
        if clusters and value - clusters[-1][0] <= 2 * eta:
            clusters[-1].append(value)
        else:
            clusters.append([value])
    largest = max(len(c) for c in clusters)
    winners = [c for c in clusters if len(c) == largest]
    if len(winners) > 1:
        logger.debug("Noisy vote for node %d tied across %d clusters; keeping the tightest",
                     node, len(winners))
    best = min(winners, key=lambda c: (c[-1] - c[0], c[0]))
    return float(np.median(best))


def _select_noisy_fit(
    g: NcsGraph, m: MeasurementSet, pool: Sequence[Edge], k_limit: int, eta: float
) -> Tuple[Optional[LeastSquaresFit], int]:
    """
    Least-squares distribution selection for noisy rounds.

    The fault-free fit is kept when every residual is within eta and no
    session would be assigned a fault beyond eta if it alone were assumed
    faulty. Otherwise distributions of k sessions drawn from ``pool`` are
    fitted for k = 1, 2, ...; at the first k where some fit keeps every
    residual within eta, the fit whose assumed faults all exceed eta and
    whose sum of squared residuals is smallest wins (lexicographic order
    breaks ties).

    Returns:
        Tuple (selected fit or None when nothing qualifies, fits examined)
    """
    examined = 1
    try:
        clean = least_squares_fit(g, m, FaultDistribution())
    except RankDeficientError:
        clean = None
    if clean is not None and clean.max_abs_residual <= eta and all(
        abs(v) <= eta for v in clean.deleted_residuals().values()
    ):
        return clean, examined

    for k in range(1, k_limit + 1):
        best: Optional[LeastSquaresFit] = None
        best_key = None
        for assumed in combinations(pool, k):
            examined += 1
            try:
                fit = least_squares_fit(g, m, FaultDistribution.of(assumed))
            except RankDeficientError:
                continue
            if fit.max_abs_residual > eta:
                continue
            key = (not fit.faults_exceed(eta), fit.sum_of_squares)
            if best is None or key < best_key:
                best, best_key = fit, key
        if best is not None:
            logger.debug("Noisy selection kept %s (residual sum of squares %.4f) after %d fits",
                         [str(e) for e in best.distribution.ordered], best.sum_of_squares, examined)
            return best, examined
    return None, examined


def ncs_fast(
    g: NcsGraph, m: MeasurementSet, mode: SolveMode = SolveMode.EXACT, eta: float = DEFAULT_ETA
) -> SyncResult:
    """
    Fast synchronization by majority vote over edge-disjoint paths.

    Args:
        g: Connected NCS graph
        m: Measurements covering every edge
        mode: EXACT votes on equal values; NOISY clusters candidates within 2*eta
            and then refits the suspect sessions by least squares
        eta: Residual threshold for noisy mode

    Returns:
        SyncResult with the voted offsets and the detected faults

    Raises:
        DisconnectedGraphError: If g is not connected
        AmbiguousVoteError: On an exact-mode tie
    """
    m.validate_against(g)
    if not is_connected(g):
        raise DisconnectedGraphError("Fast synchronization needs a connected graph")

    offsets: List[Number] = []
    examined = 0
    for node in range(1, g.node_count):
        _, paths = max_edge_disjoint_paths(g, REFERENCE_NODE, node)
        candidates = [chain_estimate(path, m) for path in paths]
        examined += len(candidates)
        if mode is SolveMode.EXACT:
            offsets.append(_exact_vote(node, candidates))
        else:
            offsets.append(_noisy_vote(node, candidates, eta))
        logger.debug("Node %d: %d paths, offset %s", node, len(candidates), offsets[-1])

    if mode is SolveMode.EXACT:
        faults = detect_faults(g, m, offsets)
        return SyncResult(NcsSolution(tuple(offsets), faults), Algorithm.FAST, examined, mode=mode)

    # Noisy mode: sessions whose defect against the voted offsets exceeds
    # eta / 2 are suspects; the least-squares selection runs over them
    suspects = detect_faults(g, m, offsets, eta / 2)
    ranked = sorted(suspects, key=lambda e: -abs(suspects[e]))[:NOISY_CANDIDATE_LIMIT]
    pool = sorted(ranked)
    k_limit = min(len(pool), g.edge_count - (g.node_count - 1))
    fit, _ = _select_noisy_fit(g, m, pool, k_limit, eta)
    if fit is not None:
        offsets = list(fit.solution.offsets)
    else:
        flagged = detect_faults(g, m, offsets, eta)
        try:
            refined, _ = residual_least_squares(g, m, FaultDistribution.of(flagged))
            offsets = list(refined.offsets)
        except RankDeficientError:
            logger.debug("Refit skipped: %d flagged sessions leave the system rank-deficient",
                         len(flagged))
    faults = detect_faults(g, m, offsets, eta)
    return SyncResult(NcsSolution(tuple(offsets), faults), Algorithm.FAST, examined, mode=mode)


def ncs_exhaustive(
    g: NcsGraph,
    m: MeasurementSet,
    mode: SolveMode = SolveMode.EXACT,
    eta: float = DEFAULT_ETA,
    max_faults: Optional[int] = None,
) -> SyncResult:
    """
    Exhaustive synchronization: try every distribution of k assumed faults
    for k = 0, 1, ... in lexicographic order over the sorted edges.

    Exact mode accepts the first distribution whose system has a unique
    solution; underdetermined distributions are skipped. Noisy mode keeps
    the fault-free fit only while no single session stands out beyond eta,
    and otherwise takes the smallest k with a fit whose residuals are all
    within eta, preferring assumed faults beyond eta and then the smallest
    residual sum of squares.

    Args:
        g: NCS graph
        m: Measurements covering every edge
        mode: EXACT or NOISY
        eta: Residual threshold for noisy mode
        max_faults: Optional cap on k

    Returns:
        SyncResult with the accepted distribution

    Raises:
        NoSolutionFound: If no distribution is accepted
    """
    m.validate_against(g)
    edges = g.sorted_edges
    # Beyond this k every system has more unknowns than equations
    k_limit = len(edges) - (g.node_count - 1)
    if max_faults is not None:
        k_limit = min(k_limit, max_faults)

    if mode is SolveMode.NOISY:
        fit, examined = _select_noisy_fit(g, m, edges, k_limit, eta)
        if fit is None:
            raise NoSolutionFound(
                f"No distribution of up to {k_limit} assumed faults fits within eta={eta}"
            )
        return SyncResult(fit.solution, Algorithm.EXHAUSTIVE, examined,
                          fit.distribution.assumed_faulty, mode)

    examined = 0
    for k in range(0, k_limit + 1):
        logger.debug("exhaustive search: trying %d assumed faults", k)
        for assumed in combinations(edges, k):
            examined += 1
            distribution = FaultDistribution.of(assumed)
            outcome, solution = solve_distribution(g, m, distribution)
            if not outcome.is_unique:
                continue
            logger.debug("exhaustive search accepted %s after %d distributions",
                         [str(e) for e in assumed], examined)
            return SyncResult(solution, Algorithm.EXHAUSTIVE, examined,
                              distribution.assumed_faulty, mode)

    raise NoSolutionFound(f"No distribution of up to {k_limit} assumed faults admits a solution")


def synchronize(
    g: NcsGraph,
    m: MeasurementSet,
    algorithm: Algorithm = Algorithm.FAST,
    mode: SolveMode = SolveMode.EXACT,
    eta: float = DEFAULT_ETA,
) -> SyncResult:
    """Dispatch to the selected solver."""
    if algorithm is Algorithm.EXHAUSTIVE:
        return ncs_exhaustive(g, m, mode=mode, eta=eta)
    return ncs_fast(g, m, mode=mode, eta=eta)
