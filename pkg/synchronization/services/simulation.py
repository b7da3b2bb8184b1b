"""
Fault-injection simulation service.
Handles synthetic measurement rounds, noisy simulation campaigns, exact-mode
resilience sweeps and the equal-value cut counterexample.

Randomness: every trial draws from its own PCG64 stream derived from
``SeedSequence(seed, spawn_key=(fault_count, trial_index))``, so results do
not depend on execution order or worker count.
"""
import logging
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import partial
from itertools import combinations, product
from math import comb
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from synchronization.conf import get_setting, worker_count
from synchronization.exceptions import InvalidGraphError, NcsError
from synchronization.services.bounds import tight_bound
from synchronization.services.graph_core import REFERENCE_NODE, Edge, NcsGraph, reachable_from
from synchronization.services.linsys import ClockState, MeasurementSet, Number, as_number
from synchronization.services.solvers import Algorithm, SolveMode, synchronize

logger = logging.getLogger(__name__)

EQUAL_FAULT_VALUE = Fraction(5)


class ValueStrategy(str, Enum):
    RANDOM = 'random'
    EQUAL_VALUE_CUT = 'equal_value_cut'


@dataclass(frozen=True)
class FaultMap:
    """Injected fault value per faulty session."""

    faults: Dict[Edge, Number] = field(default_factory=dict, hash=False)

    def __post_init__(self):
        zero = [str(e) for e, v in self.faults.items() if v == 0]
        if zero:
            raise NcsError(f"Fault values must be nonzero (edges {zero})")

    @classmethod
    def of(cls, faults: Dict[Edge, object]) -> 'FaultMap':
        return cls({edge: as_number(v) for edge, v in sorted(faults.items())})

    @property
    def edges(self) -> FrozenSet[Edge]:
        return frozenset(self.faults)

    def get(self, edge: Edge, default=0):
        return self.faults.get(edge, default)

    def __len__(self) -> int:
        return len(self.faults)


@dataclass(frozen=True)
class NoiseModel:
    """
    General error pattern e = eps + x * F: Gaussian noise eps, Bernoulli
    occurrence x and fault magnitude |F| in ``fault_magnitude_range``.
    """

    gaussian_sigma: float = 1.0
    fault_magnitude_range: Tuple[float, float] = (2.0, 8.0)
    fault_probability: float = 0.5
    threshold_eta: float = 2.0
    offset_range: float = 10.0

    def __post_init__(self):
        lo, hi = self.fault_magnitude_range
        if not 0 <= self.fault_probability <= 1:
            raise NcsError(f"fault_probability must lie in [0, 1], got {self.fault_probability}")
        if self.gaussian_sigma < 0 or lo < 0 or hi < lo:
            raise NcsError(
                f"Invalid noise model (sigma={self.gaussian_sigma}, range=[{lo}, {hi}])"
            )
        if lo < self.threshold_eta:
            warnings.warn(
                f"Fault magnitudes from {lo} fall below the threshold eta={self.threshold_eta}; "
                "small faults will pass as noise",
                UserWarning,
                stacklevel=2,
            )

    @classmethod
    def from_settings(cls, **overrides) -> 'NoiseModel':
        values = {
            'gaussian_sigma': get_setting('NCS_DEFAULT_SIGMA'),
            'fault_magnitude_range': (get_setting('NCS_FAULT_MIN'), get_setting('NCS_FAULT_MAX')),
            'threshold_eta': get_setting('NCS_DEFAULT_ETA'),
            'offset_range': get_setting('NCS_OFFSET_RANGE'),
        }
        values.update(overrides)
        return cls(**values)


@dataclass(frozen=True)
class TrialRecord:
    trial_id: int
    fault_count: int
    injected_fault_edges: FrozenSet[Edge]
    estimated_fault_edges: FrozenSet[Edge]
    distributions_identical: bool
    mse_offsets: float
    solver_used: Algorithm

    def to_dict(self) -> Dict:
        return {
            'trial_id': self.trial_id,
            'fault_count': self.fault_count,
            'identical': self.distributions_identical,
            'mse': self.mse_offsets,
            'solver': self.solver_used.value,
            'injected': [e.as_list() for e in sorted(self.injected_fault_edges)],
            'estimated': [e.as_list() for e in sorted(self.estimated_fault_edges)],
        }


@dataclass(frozen=True)
class SweepSummary:
    fault_count: int
    trials: int
    successes: int
    exhaustive: bool
    failures: Tuple[Dict[Edge, Number], ...] = field(default=(), hash=False)

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials if self.trials else 1.0


@dataclass(frozen=True)
class CutCounterexample:
    """Equal-value faults on part of a minimum cut, shifting the far side."""

    faults: FaultMap
    cut: FrozenSet[Edge]
    assumed: FrozenSet[Edge]
    near_side: FrozenSet[int]


def trial_rng(seed: int, *keys: int) -> np.random.Generator:
    """Independent PCG64 stream for one trial."""
    if seed < 0:
        raise NcsError(f"Seeds must be non-negative, got {seed}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=keys)))


def random_rational(rng: np.random.Generator, limit: int = 60) -> Fraction:
    """Nonzero rational with small numerator and denominator."""
    numerator = int(rng.integers(1, limit + 1)) * (1 if rng.random() < 0.5 else -1)
    return Fraction(numerator, int(rng.integers(1, 8)))


def random_truth(
    g: NcsGraph, rng: np.random.Generator, offset_range: float = 10.0, exact: bool = False
) -> ClockState:
    """True offsets, uniform in [-offset_range, offset_range] (rational grid when exact)."""
    if exact:
        scale = 8
        bound = int(offset_range * scale)
        return ClockState(tuple(Fraction(int(rng.integers(-bound, bound + 1)), scale)
                                for _ in range(g.node_count - 1)))
    return ClockState(tuple(float(v) for v in
                            rng.uniform(-offset_range, offset_range, g.node_count - 1)))


def sample_fault_map(
    g: NcsGraph,
    noise: NoiseModel,
    rng: np.random.Generator,
    count: Optional[int] = None,
    exact: bool = False,
) -> FaultMap:
    """
    Draw faulty sessions and their values.

    Args:
        g: NCS graph
        noise: Source of the magnitude range and occurrence probability
        rng: Trial generator
        count: Exact number of faulty sessions (uniform without replacement);
            None draws each session independently with ``fault_probability``
        exact: Rational values instead of floats

    Raises:
        NcsError: If count exceeds the number of sessions
    """
    edges = g.sorted_edges
    if count is None:
        chosen = [e for e in edges if rng.random() < noise.fault_probability]
    else:
        if not 0 <= count <= len(edges):
            raise NcsError(f"Cannot inject {count} faults into {len(edges)} sessions")
        indices = sorted(int(i) for i in rng.choice(len(edges), size=count, replace=False))
        chosen = [edges[i] for i in indices]
    lo, hi = noise.fault_magnitude_range
    faults = {}
    for edge in chosen:
        if exact:
            faults[edge] = random_rational(rng)
        else:
            sign = 1.0 if rng.random() < 0.5 else -1.0
            faults[edge] = sign * float(rng.uniform(lo, hi))
    return FaultMap(faults)


def generate_round(
    g: NcsGraph,
    truth: ClockState,
    faults: FaultMap,
    noise: Optional[NoiseModel] = None,
    seed: int = 0,
) -> MeasurementSet:
    """
    Synthesize one round: true pairwise offset + injected fault + noise.

    Without a noise model the values keep the types of truth and faults
    (exact rationals stay exact).

    Raises:
        InvalidGraphError: If faults name unknown edges or truth has the wrong length
    """
    if truth.node_count != g.node_count:
        raise InvalidGraphError(
            f"Truth covers {truth.node_count} nodes but the graph has {g.node_count}"
        )
    g._check_subset(faults.edges)
    rng = trial_rng(seed)
    values = {}
    for edge in g.sorted_edges:
        value = truth.pairwise(edge) + faults.get(edge)
        if noise is not None:
            value = float(value)
            if noise.gaussian_sigma > 0:
                value += float(rng.normal(0.0, noise.gaussian_sigma))
        values[edge] = value
    return MeasurementSet(values)


def _mse(estimated: Sequence[Number], truth: ClockState) -> float:
    if not truth.offsets:
        return 0.0
    errors = np.array([float(e) - float(t) for e, t in zip(estimated, truth.offsets)])
    return float(np.mean(errors ** 2))


def _run_trial(
    task: Tuple[int, int, int], g: NcsGraph, noise: NoiseModel, seed: int, solver: Algorithm
) -> TrialRecord:
    trial_id, fault_count, index = task
    rng = trial_rng(seed, fault_count, index)
    truth = random_truth(g, rng, noise.offset_range)
    faults = sample_fault_map(g, noise, rng, fault_count)
    measurements = generate_round(g, truth, faults, noise, int(rng.integers(2 ** 32)))
    eta = noise.threshold_eta
    try:
        result = synchronize(g, measurements, solver, SolveMode.NOISY, eta)
    except NcsError as exc:
        logger.warning("Trial %d (%d faults) failed: %s", trial_id, fault_count, exc)
        return TrialRecord(trial_id, fault_count, faults.edges, frozenset(), False,
                           float('inf'), solver)
    estimated = frozenset(e for e, v in result.fault_estimates.items() if abs(v) > eta)
    return TrialRecord(
        trial_id=trial_id,
        fault_count=fault_count,
        injected_fault_edges=faults.edges,
        estimated_fault_edges=estimated,
        distributions_identical=estimated == faults.edges,
        mse_offsets=_mse(result.offsets, truth),
        solver_used=solver,
    )


def run_campaign(
    g: NcsGraph,
    config: NoiseModel,
    fault_counts: Sequence[int],
    trials_per_count: int,
    seed: int,
    solver: Algorithm = Algorithm.FAST,
    workers: Optional[int] = None,
) -> List[TrialRecord]:
    """
    Run noisy-mode trials for each fault count.

    Args:
        g: NCS graph
        config: Noise model
        fault_counts: Number of injected faults per batch
        trials_per_count: Trials per fault count
        seed: Campaign seed
        solver: FAST or EXHAUSTIVE
        workers: Worker processes (None or 0 uses NCS_THREADS)

    Returns:
        TrialRecords ordered by trial id

    Raises:
        NcsError: On a non-positive trial count or a fault count above |E|
    """
    if trials_per_count < 1:
        raise NcsError(f"trials_per_count must be at least 1, got {trials_per_count}")
    for count in fault_counts:
        if not 0 <= count <= g.edge_count:
            raise NcsError(f"Cannot inject {count} faults into {g.edge_count} sessions")

    tasks = []
    for count in fault_counts:
        for index in range(trials_per_count):
            tasks.append((len(tasks), count, index))

    run = partial(_run_trial, g=g, noise=config, seed=seed, solver=solver)
    processes = min(worker_count(workers), len(tasks))
    logger.info("Campaign: %d trials on %d worker(s)", len(tasks), processes)
    if processes > 1:
        with ProcessPoolExecutor(max_workers=processes) as pool:
            return list(pool.map(run, tasks, chunksize=max(1, len(tasks) // (4 * processes))))
    return [run(task) for task in tasks]


def build_cut_counterexample(g: NcsGraph, value: Number = EQUAL_FAULT_VALUE) -> CutCounterexample:
    """
    Place K*+1 equal-valued faults on a minimum cut.

    Each fault is oriented so the far side of the cut appears shifted by
    -value: +value when the edge's lower endpoint is on the reference side,
    -value otherwise. The remaining cut edges are the assumed-faulty targets
    that explain the shifted solution.
    """
    report = tight_bound(g)
    near = frozenset(reachable_from(g, REFERENCE_NODE, report.witness_cut))
    cut = sorted(report.witness_cut)
    faulty = cut[:report.tight_bound + 1]
    value = as_number(value)
    faults = {edge: value if edge.a in near else -value for edge in faulty}
    return CutCounterexample(
        faults=FaultMap(faults),
        cut=report.witness_cut,
        assumed=frozenset(cut[report.tight_bound + 1:]),
        near_side=near,
    )


def _placements(edges, k, rng, cap, sample_size) -> Tuple[List[Tuple[Edge, ...]], bool]:
    if comb(len(edges), k) <= cap:
        return list(combinations(edges, k)), True
    placements = []
    for _ in range(sample_size):
        indices = sorted(int(i) for i in rng.choice(len(edges), size=k, replace=False))
        placements.append(tuple(edges[i] for i in indices))
    return placements, False


def _value_assignments(placement, strategy, rng, values_per_placement):
    if strategy is ValueStrategy.EQUAL_VALUE_CUT:
        for signs in product((1, -1), repeat=len(placement)):
            yield {e: s * EQUAL_FAULT_VALUE for e, s in zip(placement, signs)}
    else:
        for _ in range(values_per_placement):
            yield {e: random_rational(rng) for e in placement}


def _exact_trial_succeeds(g, faults, rng, algorithm) -> bool:
    truth = random_truth(g, rng, exact=True)
    measurements = generate_round(g, truth, FaultMap(faults))
    try:
        result = synchronize(g, measurements, algorithm, SolveMode.EXACT)
    except NcsError:
        return False
    return tuple(result.offsets) == truth.offsets


def sweep_resilience(
    g: NcsGraph,
    max_faults: int,
    value_strategy: ValueStrategy = ValueStrategy.RANDOM,
    seed: int = 0,
    algorithm: Algorithm = Algorithm.FAST,
    exhaustive_cap: Optional[int] = None,
    sample_size: Optional[int] = None,
    values_per_placement: int = 1,
) -> List[SweepSummary]:
    """
    Exact-mode correction success rate for K = 1..max_faults.

    Placements are exhaustive up to ``exhaustive_cap`` combinations and
    sampled beyond. RANDOM draws nonzero rational values; EQUAL_VALUE_CUT
    gives every fault magnitude 5 under every sign pattern and, at
    K = tight bound + 1, also runs the cut counterexample.

    Returns:
        One SweepSummary per fault count
    """
    exhaustive_cap = exhaustive_cap or get_setting('NCS_SWEEP_EXHAUSTIVE_CAP')
    sample_size = sample_size or get_setting('NCS_SWEEP_SAMPLE_SIZE')
    bound = tight_bound(g).tight_bound
    edges = g.sorted_edges
    summaries = []

    for k in range(1, min(max_faults, len(edges)) + 1):
        rng = trial_rng(seed, k)
        placements, exhaustive = _placements(edges, k, rng, exhaustive_cap, sample_size)
        assignments: List[Dict[Edge, Number]] = []
        if value_strategy is ValueStrategy.EQUAL_VALUE_CUT and k == bound + 1:
            assignments.append(dict(build_cut_counterexample(g).faults.faults))
        for placement in placements:
            assignments.extend(_value_assignments(placement, value_strategy, rng,
                                                  values_per_placement))

        successes = 0
        failures = []
        for faults in assignments:
            if _exact_trial_succeeds(g, faults, rng, algorithm):
                successes += 1
            else:
                failures.append(faults)
        logger.debug("Sweep K=%d: %d/%d corrected", k, successes, len(assignments))
        summaries.append(SweepSummary(k, len(assignments), successes, exhaustive, tuple(failures)))
    return summaries
