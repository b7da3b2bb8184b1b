"""
File service for clock synchronization.
Handles loading graph, measurement and truth files and the canonical JSON
serialization used by every command.

Exact values are written as decimal strings ("1.25"), or as "p/q" when the
decimal expansion does not terminate, next to an "exact": true marker.
"""
import json
import os
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Any, Dict, List, Tuple

from synchronization.exceptions import InvalidGraphError, NcsFileError
from synchronization.services.graph_core import Edge, NcsGraph
from synchronization.services.linsys import ClockState, MeasurementSet, Number
from synchronization.services.solvers import SyncResult


def format_value(value: Number):
    """Serialize a Fraction as an exact string; floats stay JSON numbers."""
    if not isinstance(value, Fraction):
        return float(value)
    denominator = value.denominator
    for prime in (2, 5):
        while denominator % prime == 0:
            denominator //= prime
    if denominator != 1:
        return f"{value.numerator}/{value.denominator}"
    with localcontext() as ctx:
        ctx.prec = 200
        text = format(Decimal(value.numerator) / Decimal(value.denominator), 'f')
    if '.' in text:
        text = text.rstrip('0').rstrip('.')
    return '0' if text in ('-0', '') else text


def parse_value(raw: Any, exact: bool) -> Number:
    """
    Parse a measurement or offset value.

    Raises:
        NcsFileError: If the value is not numeric
    """
    if isinstance(raw, bool):
        raise NcsFileError(f"Invalid numeric value: {raw!r}")
    try:
        if exact:
            if isinstance(raw, float):
                return Fraction(str(raw))
            return Fraction(str(raw).strip())
        if isinstance(raw, str) and '/' in raw:
            return float(Fraction(raw.strip()))
        return float(raw)
    except (ValueError, ZeroDivisionError, TypeError):
        raise NcsFileError(f"Invalid numeric value: {raw!r}")


def dump_json(payload: Dict[str, Any]) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def graph_to_dict(g: NcsGraph) -> Dict[str, Any]:
    return {'nodes': g.node_count, 'edges': [e.as_list() for e in g.sorted_edges]}


def graph_from_dict(data: Any) -> NcsGraph:
    """
    Build a graph from ``{"nodes": N, "edges": [[a, b], ...]}``; a < b is required.

    Raises:
        NcsFileError: On structural problems
        InvalidGraphError: On invalid edges
    """
    if not isinstance(data, dict) or 'nodes' not in data or 'edges' not in data:
        raise NcsFileError("Graph object needs 'nodes' and 'edges'")
    node_count = data['nodes']
    if not isinstance(node_count, int) or isinstance(node_count, bool):
        raise NcsFileError(f"'nodes' must be an integer, got {node_count!r}")
    edges = set()
    for pair in data['edges']:
        if not isinstance(pair, list) or len(pair) != 2 or not all(isinstance(v, int) for v in pair):
            raise NcsFileError(f"Edge entries must be [a, b] integer pairs, got {pair!r}")
        edge = Edge(pair[0], pair[1])
        if edge in edges:
            raise InvalidGraphError(f"Duplicate edge {edge}")
        edges.add(edge)
    return NcsGraph(node_count, frozenset(edges))


def _read_text(file_path: str) -> str:
    if not os.path.exists(file_path):
        raise FileNotFoundError(f"File not found: {file_path}")
    with open(file_path, encoding='utf-8') as handle:
        return handle.read()


def _read_json(file_path: str) -> Any:
    try:
        return json.loads(_read_text(file_path))
    except json.JSONDecodeError as e:
        raise NcsFileError(f"Invalid JSON in {file_path}: {e}")


def parse_edge_list(text: str) -> NcsGraph:
    """
    Plain-text edge list, one "a b" pair per line; '#' starts a comment.
    Node count is the largest id + 1.
    """
    pairs: List[Tuple[int, int]] = []
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        fields = line.replace(',', ' ').split()
        if len(fields) != 2:
            raise NcsFileError(f"Line {number}: expected 'a b', got {line!r}")
        try:
            pairs.append((int(fields[0]), int(fields[1])))
        except ValueError:
            raise NcsFileError(f"Line {number}: node ids must be integers, got {line!r}")
    if not pairs:
        raise NcsFileError("Edge list contains no edges")
    node_count = max(max(pair) for pair in pairs) + 1
    return NcsGraph.from_pairs(node_count, pairs)


def load_graph(file_path: str) -> NcsGraph:
    """
    Load a graph file (JSON object or plain-text edge list).

    Args:
        file_path: Path to the graph file

    Returns:
        NcsGraph

    Raises:
        FileNotFoundError: If file doesn't exist
        NcsFileError: If the content is malformed
    """
    text = _read_text(file_path)
    if file_path.endswith('.json') or text.lstrip().startswith('{'):
        try:
            return graph_from_dict(json.loads(text))
        except json.JSONDecodeError as e:
            raise NcsFileError(f"Invalid JSON in {file_path}: {e}")
    return parse_edge_list(text)


def measurements_to_dict(g: NcsGraph, m: MeasurementSet) -> Dict[str, Any]:
    return {
        'exact': m.exact,
        'graph': graph_to_dict(g),
        'measurements': [[e.a, e.b, format_value(m.value(e))] for e in g.sorted_edges],
    }


def load_measurements(file_path: str, exact: bool = True) -> Tuple[NcsGraph, MeasurementSet]:
    """
    Load ``{"graph": {...}, "measurements": [[a, b, value], ...]}``.

    Args:
        file_path: Path to the measurement file
        exact: Parse values as rationals (exact mode) or floats (noisy mode)

    Raises:
        FileNotFoundError: If file doesn't exist
        NcsFileError: If the content is malformed
        MeasurementMismatchError: If measurements do not cover the edges exactly
    """
    data = _read_json(file_path)
    if not isinstance(data, dict) or 'graph' not in data or 'measurements' not in data:
        raise NcsFileError(f"{file_path}: expected 'graph' and 'measurements'")
    g = graph_from_dict(data['graph'])
    values: Dict[Edge, Number] = {}
    for row in data['measurements']:
        if not isinstance(row, list) or len(row) != 3:
            raise NcsFileError(f"Measurement rows must be [a, b, value], got {row!r}")
        edge = Edge(row[0], row[1])
        if edge in values:
            raise NcsFileError(f"Duplicate measurement for edge {edge}")
        values[edge] = parse_value(row[2], exact)
    m = MeasurementSet(dict(sorted(values.items())))
    m.validate_against(g)
    return g, m


def truth_to_dict(truth: ClockState, faults: Dict[Edge, Number]) -> Dict[str, Any]:
    return {
        'exact': truth.exact,
        'faults': [[e.a, e.b, format_value(v)] for e, v in sorted(faults.items())],
        'offsets': [format_value(v) for v in truth.offsets],
    }


def load_truth(file_path: str) -> ClockState:
    """Load the offsets of a truth file written by ``gen round``."""
    data = _read_json(file_path)
    if not isinstance(data, dict) or 'offsets' not in data:
        raise NcsFileError(f"{file_path}: expected 'offsets'")
    exact = bool(data.get('exact', True))
    return ClockState(tuple(parse_value(v, exact) for v in data['offsets']))


def result_to_dict(result: SyncResult) -> Dict[str, Any]:
    offsets = result.solution.offsets
    payload = {
        'algorithm': result.algorithm.value,
        'exact': all(isinstance(v, Fraction) for v in offsets),
        'faults': [[e.a, e.b, format_value(v)] for e, v in sorted(result.fault_estimates.items())],
        'iterations_examined': result.iterations_examined,
        'mode': result.mode.value,
        'offsets': [format_value(v) for v in offsets],
    }
    if result.assumed_distribution is not None:
        payload['assumed_distribution'] = [e.as_list() for e in sorted(result.assumed_distribution)]
    return payload


def write_text(file_path: str, text: str) -> None:
    with open(file_path, 'w', encoding='utf-8') as handle:
        handle.write(text)
