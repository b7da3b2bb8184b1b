"""
Linear system service for clock synchronization.
Builds the per-round NCS equation system A x = b for an assumed fault
distribution, classifies it by the Rouché–Capelli rank test and solves it
exactly (rational arithmetic) or by least squares (noisy mode).

Sign convention: for canonical edge (a, b) the measurement estimates
offset(a) - offset(b), where offsets are relative to reference node 0.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple, Union

import numpy as np

from synchronization.exceptions import MeasurementMismatchError, RankDeficientError
from synchronization.services.graph_core import Edge, NcsGraph

logger = logging.getLogger(__name__)

Number = Union[Fraction, float]


def as_number(value) -> Number:
    """Coerce ints and strings to Fraction; floats stay floats."""
    if isinstance(value, (Fraction, float)):
        return value
    if isinstance(value, (np.floating,)):
        return float(value)
    return Fraction(value)


@dataclass(frozen=True)
class ClockState:
    """Offsets of nodes 1..N-1 relative to the reference node (whose offset is 0)."""

    offsets: Tuple[Number, ...]

    @classmethod
    def of(cls, offsets: Iterable) -> 'ClockState':
        return cls(tuple(as_number(v) for v in offsets))

    @classmethod
    def zeros(cls, node_count: int) -> 'ClockState':
        return cls(tuple(Fraction(0) for _ in range(node_count - 1)))

    @property
    def node_count(self) -> int:
        return len(self.offsets) + 1

    def offset(self, node: int) -> Number:
        return Fraction(0) if node == 0 else self.offsets[node - 1]

    def pairwise(self, edge: Edge) -> Number:
        """True offset of ``edge.a`` relative to ``edge.b``."""
        return self.offset(edge.a) - self.offset(edge.b)

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.offsets)


@dataclass(frozen=True, eq=True)
class MeasurementSet:
    """Measured offset per canonical edge for one synchronization round."""

    values: Mapping[Edge, Number] = field(hash=False)

    @classmethod
    def of(cls, values: Mapping[Edge, object]) -> 'MeasurementSet':
        return cls({edge: as_number(v) for edge, v in sorted(values.items())})

    def value(self, edge: Edge) -> Number:
        return self.values[edge]

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.values.values())

    def validate_against(self, g: NcsGraph) -> None:
        """
        Raises:
            MeasurementMismatchError: If the key set differs from the edge set
        """
        keys = set(self.values)
        if keys != set(g.edges):
            missing = sorted(set(g.edges) - keys)
            extra = sorted(keys - set(g.edges))
            raise MeasurementMismatchError(
                f"Measurements do not match graph edges "
                f"(missing: {[str(e) for e in missing]}, extra: {[str(e) for e in extra]})"
            )


@dataclass(frozen=True)
class FaultDistribution:
    """Set of sessions assumed faulty when building a system."""

    assumed_faulty: FrozenSet[Edge] = frozenset()

    @classmethod
    def of(cls, edges: Iterable[Edge]) -> 'FaultDistribution':
        return cls(frozenset(edges))

    @property
    def ordered(self) -> Tuple[Edge, ...]:
        return tuple(sorted(self.assumed_faulty))

    def __len__(self) -> int:
        return len(self.assumed_faulty)


@dataclass(frozen=True)
class NcsSolution:
    """Estimated offsets and estimated faults."""

    offsets: Tuple[Number, ...]
    fault_estimates: Dict[Edge, Number] = field(default_factory=dict, hash=False)

    @property
    def clock_state(self) -> ClockState:
        return ClockState(self.offsets)

    def offset(self, node: int) -> Number:
        return self.clock_state.offset(node)


class SolveStatus(Enum):
    NO_SOLUTION = 'no_solution'
    UNIQUE = 'unique'
    UNDERDETERMINED = 'underdetermined'


@dataclass(frozen=True)
class SolveOutcome:
    """Rouché–Capelli classification of A x = b plus the solution vector when unique."""

    status: SolveStatus
    rank: int
    augmented_rank: int
    values: Optional[Tuple[Number, ...]] = None

    @property
    def is_unique(self) -> bool:
        return self.status is SolveStatus.UNIQUE


@dataclass(frozen=True)
class NcsSystem:
    """Equation system for one assumed distribution; rows follow ``rows`` (sorted edges)."""

    matrix: np.ndarray = field(compare=False)
    rhs: np.ndarray = field(compare=False)
    rows: Tuple[Edge, ...]
    fault_columns: Tuple[Edge, ...]
    node_count: int

    def __iter__(self):
        # Unpacks as (A, b)
        return iter((self.matrix, self.rhs))

    def to_solution(self, values: Iterable[Number]) -> NcsSolution:
        values = list(values)
        offsets = tuple(values[:self.node_count - 1])
        estimates = dict(zip(self.fault_columns, values[self.node_count - 1:]))
        return NcsSolution(offsets, estimates)


def build_system(g: NcsGraph, m: MeasurementSet, d: FaultDistribution) -> NcsSystem:
    """
    Build the NCS equation system for an assumed fault distribution.

    Columns are the N-1 offsets followed by one fault column per assumed
    edge in sorted order. Exact measurements give a Fraction object array,
    float measurements a float array.

    Args:
        g: NCS graph
        m: Measurements covering every edge of g
        d: Assumed-faulty distribution, a subset of g's edges

    Returns:
        NcsSystem (unpackable as (A, b))

    Raises:
        MeasurementMismatchError: If m does not cover exactly g's edges
        InvalidGraphError: If d names an edge outside g
    """
    m.validate_against(g)
    g._check_subset(d.assumed_faulty)
    fault_columns = d.ordered
    offset_columns = g.node_count - 1
    exact = m.exact
    zero, one = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)
    dtype = object if exact else float

    rows = g.sorted_edges
    matrix = np.full((len(rows), offset_columns + len(fault_columns)), zero, dtype=dtype)
    rhs = np.full(len(rows), zero, dtype=dtype)
    fault_index = {edge: offset_columns + i for i, edge in enumerate(fault_columns)}

    for r, edge in enumerate(rows):
        if edge.a != 0:
            matrix[r, edge.a - 1] = one
        matrix[r, edge.b - 1] = -one
        if edge in fault_index:
            matrix[r, fault_index[edge]] = one
        rhs[r] = m.value(edge) if exact else float(m.value(edge))

    return NcsSystem(matrix, rhs, rows, fault_columns, g.node_count)


def _to_fraction_matrix(a) -> np.ndarray:
    matrix = np.atleast_2d(np.array(a, dtype=object))
    for index in np.ndindex(matrix.shape):
        matrix[index] = Fraction(matrix[index])
    return matrix


def classify_and_solve(A, b) -> SolveOutcome:
    """
    Classify and solve A x = b exactly.

    Gauss-Jordan elimination over the augmented matrix in rational
    arithmetic; the pivot in each column is the entry of largest absolute
    value (first row on ties).

    Args:
        A: Coefficient matrix (any numeric entries, converted to Fraction)
        b: Right-hand side

    Returns:
        SolveOutcome with NO_SOLUTION, UNIQUE (with values) or UNDERDETERMINED
    """
    # Step 1: Build the augmented matrix [A | b]
    a = _to_fraction_matrix(A)
    rhs = np.array([Fraction(v) for v in np.asarray(b, dtype=object).ravel()], dtype=object)
    if a.shape[0] != rhs.shape[0]:
        raise ValueError(f"A has {a.shape[0]} rows but b has {rhs.shape[0]} entries")
    aug = np.concatenate([a, rhs.reshape(-1, 1)], axis=1)
    n_rows, n_cols = a.shape

    # Step 2: Gauss-Jordan over the coefficient columns
    pivot_row = 0
    pivots: List[Tuple[int, int]] = []
    for col in range(n_cols):
        if pivot_row >= n_rows:
            break
        column = [abs(aug[r, col]) for r in range(pivot_row, n_rows)]
        best = max(range(len(column)), key=lambda i: (column[i], -i))
        if column[best] == 0:
            continue
        best += pivot_row
        if best != pivot_row:
            aug[[pivot_row, best]] = aug[[best, pivot_row]]
        aug[pivot_row] = aug[pivot_row] / aug[pivot_row, col]
        for r in range(n_rows):
            if r != pivot_row and aug[r, col] != 0:
                aug[r] = aug[r] - aug[r, col] * aug[pivot_row]
        pivots.append((pivot_row, col))
        pivot_row += 1

    # Step 3: Rank test
    rank = len(pivots)
    inconsistent = any(aug[r, n_cols] != 0 for r in range(rank, n_rows))
    augmented_rank = rank + (1 if inconsistent else 0)

    if inconsistent:
        return SolveOutcome(SolveStatus.NO_SOLUTION, rank, augmented_rank)
    if rank < n_cols:
        return SolveOutcome(SolveStatus.UNDERDETERMINED, rank, augmented_rank)
    values = [Fraction(0)] * n_cols
    for row, col in pivots:
        values[col] = aug[row, n_cols]
    return SolveOutcome(SolveStatus.UNIQUE, rank, augmented_rank, tuple(values))


def solve_distribution(
    g: NcsGraph, m: MeasurementSet, d: FaultDistribution
) -> Tuple[SolveOutcome, Optional[NcsSolution]]:
    """Build, classify and (when unique) map the solution back onto offsets and faults."""
    system = build_system(g, m, d)
    outcome = classify_and_solve(system.matrix, system.rhs)
    solution = system.to_solution(outcome.values) if outcome.is_unique else None
    return outcome, solution


# Sessions with leverage this close to 1 are treated as fitted exactly
LEVERAGE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class LeastSquaresFit:
    """
    Floating-point least-squares fit of one assumed distribution.

    ``residuals`` are signed (measured minus fitted). ``leverages`` are the
    diagonal of the hat matrix; a session with leverage 1 is fitted exactly
    whatever its measurement.
    """

    distribution: FaultDistribution
    solution: NcsSolution
    residuals: Dict[Edge, float] = field(hash=False)
    leverages: Dict[Edge, float] = field(hash=False)

    @property
    def sum_of_squares(self) -> float:
        return float(sum(r * r for r in self.residuals.values()))

    @property
    def max_abs_residual(self) -> float:
        return max((abs(r) for r in self.residuals.values()), default=0.0)

    def deleted_residuals(self) -> Dict[Edge, float]:
        """
        Fault estimate each unassumed session would receive if it were also
        assumed faulty: residual / (1 - leverage). Sessions without
        redundancy (leverage 1) are left out.
        """
        deleted = {}
        for edge, residual in self.residuals.items():
            if edge in self.distribution.assumed_faulty:
                continue
            slack = 1.0 - self.leverages[edge]
            if slack > LEVERAGE_TOLERANCE:
                deleted[edge] = residual / slack
        return deleted

    def faults_exceed(self, eta: float) -> bool:
        """True when every assumed fault is estimated beyond eta."""
        return all(abs(float(v)) > eta for v in self.solution.fault_estimates.values())


def least_squares_fit(g: NcsGraph, m: MeasurementSet, d: FaultDistribution) -> LeastSquaresFit:
    """
    Minimize the overall squared residual of the system in floating point.

    Args:
        g: NCS graph
        m: Measurements (converted to float)
        d: Assumed-faulty distribution

    Returns:
        LeastSquaresFit with the candidate solution, signed residuals and leverages

    Raises:
        RankDeficientError: If the system lacks full column rank
    """
    system = build_system(g, MeasurementSet({e: float(v) for e, v in m.values.items()}), d)
    a = system.matrix.astype(float)
    b = system.rhs.astype(float)
    if np.linalg.matrix_rank(a) < a.shape[1]:
        raise RankDeficientError(
            f"Least-squares system for distribution {[str(e) for e in d.ordered]} is rank-deficient"
        )
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    q, _ = np.linalg.qr(a)
    leverages = (q ** 2).sum(axis=1)
    residuals = b - a @ x
    return LeastSquaresFit(
        distribution=d,
        solution=system.to_solution(float(v) for v in x),
        residuals={edge: float(r) for edge, r in zip(system.rows, residuals)},
        leverages={edge: float(h) for edge, h in zip(system.rows, leverages)},
    )


def residual_least_squares(
    g: NcsGraph, m: MeasurementSet, d: FaultDistribution
) -> Tuple[NcsSolution, Dict[Edge, float]]:
    """Least-squares candidate and the absolute residual of every equation."""
    fit = least_squares_fit(g, m, d)
    return fit.solution, {edge: abs(r) for edge, r in fit.residuals.items()}
