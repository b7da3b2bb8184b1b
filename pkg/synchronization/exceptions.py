"""
Domain errors for the clock synchronization toolkit.

All of them derive from ValueError so callers that only guard against bad
input keep working.
"""


class NcsError(ValueError):
    """Base class for every synchronization domain error."""


class InvalidGraphError(NcsError):
    """Malformed graph: bad node ids, self-loops, duplicate or unknown edges."""


class DisconnectedGraphError(NcsError):
    """The operation needs a connected NCS graph."""


class MeasurementMismatchError(NcsError):
    """Measurement keys do not match the graph's edge set."""


class InfeasibleResilienceError(NcsError):
    """Even the complete graph cannot reach the requested resilience."""


class AmbiguousVoteError(NcsError):
    """Two candidate offsets tie for the majority in exact-mode voting."""


class RankDeficientError(NcsError):
    """Least-squares system without full column rank (underdetermined)."""


class NoSolutionFound(NcsError):
    """The exhaustive search ran out of distributions without a unique solution."""


class NcsFileError(NcsError):
    """Input file could not be parsed."""
