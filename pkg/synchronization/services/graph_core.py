"""
Graph core service for clock synchronization.
Handles the NCS graph model and the connectivity machinery: reachability,
edge-disjoint paths by unit-capacity max-flow, minimum edge cuts and global
edge connectivity.
"""
import logging
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import networkx as nx

from synchronization.exceptions import InvalidGraphError

logger = logging.getLogger(__name__)

REFERENCE_NODE = 0


@dataclass(frozen=True, order=True)
class Edge:
    """Undirected synchronization session stored in canonical orientation a < b."""

    a: int
    b: int

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise InvalidGraphError(f"Negative node id in edge ({self.a}, {self.b})")
        if self.a == self.b:
            raise InvalidGraphError(f"Self-loop on node {self.a}")
        if self.a > self.b:
            raise InvalidGraphError(f"Edge ({self.a}, {self.b}) is not in canonical a < b orientation")

    @classmethod
    def of(cls, u: int, v: int) -> 'Edge':
        """Build the canonical edge for an unordered pair."""
        return cls(min(u, v), max(u, v))

    def other(self, node: int) -> int:
        if node == self.a:
            return self.b
        if node == self.b:
            return self.a
        raise InvalidGraphError(f"Node {node} is not an endpoint of {self}")

    def as_list(self) -> List[int]:
        return [self.a, self.b]

    def __str__(self) -> str:
        return f"{self.a}-{self.b}"


@dataclass(frozen=True)
class NcsGraph:
    """
    Undirected NCS graph on nodes 0..node_count-1; node 0 is the reference.
    """

    node_count: int
    edges: FrozenSet[Edge]

    def __post_init__(self):
        if self.node_count < 1:
            raise InvalidGraphError(f"Graph needs at least one node, got {self.node_count}")
        for edge in self.edges:
            if edge.b >= self.node_count:
                raise InvalidGraphError(
                    f"Edge {edge} references node {edge.b} outside [0, {self.node_count})"
                )

    @classmethod
    def from_pairs(cls, node_count: int, pairs: Iterable[Tuple[int, int]]) -> 'NcsGraph':
        """
        Build a graph from unordered node pairs.

        Args:
            node_count: Number of nodes N
            pairs: Iterable of (u, v) pairs in any orientation

        Returns:
            NcsGraph with canonical edges

        Raises:
            InvalidGraphError: On duplicate sessions or invalid endpoints
        """
        edges: Set[Edge] = set()
        for u, v in pairs:
            edge = Edge.of(int(u), int(v))
            if edge in edges:
                raise InvalidGraphError(f"Duplicate edge {edge}")
            edges.add(edge)
        return cls(node_count, frozenset(edges))

    @classmethod
    def from_networkx(cls, graph: nx.Graph) -> 'NcsGraph':
        """Convert a networkx graph whose nodes are labelled 0..N-1."""
        nodes = sorted(graph.nodes)
        if nodes != list(range(len(nodes))):
            raise InvalidGraphError("networkx graph nodes must be labelled 0..N-1")
        return cls.from_pairs(len(nodes), graph.edges)

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.node_count))
        graph.add_edges_from((e.a, e.b) for e in self.sorted_edges)
        return graph

    @cached_property
    def sorted_edges(self) -> Tuple[Edge, ...]:
        return tuple(sorted(self.edges))

    @cached_property
    def adjacency(self) -> Dict[int, Tuple[int, ...]]:
        """Neighbors of every node in ascending NodeId order."""
        neighbors: Dict[int, List[int]] = {node: [] for node in range(self.node_count)}
        for edge in self.edges:
            neighbors[edge.a].append(edge.b)
            neighbors[edge.b].append(edge.a)
        return {node: tuple(sorted(adj)) for node, adj in neighbors.items()}

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def degree(self, node: int) -> int:
        return len(self.adjacency[node])

    def degrees(self) -> List[int]:
        return [self.degree(node) for node in range(self.node_count)]

    def min_degree(self) -> int:
        return min(self.degrees())

    def has_edge(self, u: int, v: int) -> bool:
        return u != v and Edge.of(u, v) in self.edges

    def without_edges(self, removed: Iterable[Edge]) -> 'NcsGraph':
        removed = frozenset(removed)
        self._check_subset(removed)
        return NcsGraph(self.node_count, self.edges - removed)

    def _check_subset(self, edges: FrozenSet[Edge]) -> None:
        unknown = edges - self.edges
        if unknown:
            listed = ', '.join(str(e) for e in sorted(unknown))
            raise InvalidGraphError(f"Edges not in graph: {listed}")

    def _check_node(self, node: int) -> None:
        if not 0 <= node < self.node_count:
            raise InvalidGraphError(f"Node {node} outside [0, {self.node_count})")


@dataclass(frozen=True)
class Path:
    """Walk through the graph from ``nodes[0]`` (source) to ``nodes[-1]`` (sink)."""

    nodes: Tuple[int, ...]

    @property
    def source(self) -> int:
        return self.nodes[0]

    @property
    def sink(self) -> int:
        return self.nodes[-1]

    @property
    def edges(self) -> Tuple[Edge, ...]:
        return tuple(Edge.of(u, v) for u, v in zip(self.nodes, self.nodes[1:]))

    @property
    def steps(self) -> List[Tuple[int, int]]:
        """Directed traversal steps (u, v) in path order."""
        return list(zip(self.nodes, self.nodes[1:]))

    def __len__(self) -> int:
        return len(self.nodes) - 1


def reachable_from(
    g: NcsGraph, source: int = REFERENCE_NODE, removed: FrozenSet[Edge] = frozenset()
) -> Set[int]:
    """Nodes reachable from ``source`` by breadth-first search, ignoring ``removed`` edges."""
    seen = {source}
    queue = deque([source])
    while queue:
        node = queue.popleft()
        for neighbor in g.adjacency[node]:
            if neighbor in seen or Edge.of(node, neighbor) in removed:
                continue
            seen.add(neighbor)
            queue.append(neighbor)
    return seen


def is_connected(g: NcsGraph) -> bool:
    """True iff a single search from the reference node reaches every node."""
    return len(reachable_from(g)) == g.node_count


def is_connected_after_removal(g: NcsGraph, removed: Iterable[Edge]) -> bool:
    """
    Check connectivity of g with some sessions deleted.

    Raises:
        InvalidGraphError: If ``removed`` contains an edge not in g
    """
    removed = frozenset(removed)
    g._check_subset(removed)
    return len(reachable_from(g, REFERENCE_NODE, removed)) == g.node_count


class _UnitFlow:
    """
    Unit-capacity max-flow on the directed doubling of an undirected graph.

    Net flow is stored antisymmetrically, so pushing along v->u cancels an
    earlier u->v unit and no undirected edge ever carries two units.
    """

    def __init__(self, g: NcsGraph, s: int, t: int):
        self.g = g
        self.s = s
        self.t = t
        self.flow: Dict[Tuple[int, int], int] = {}
        self.value = 0

    def residual(self, u: int, v: int) -> int:
        return 1 - self.flow.get((u, v), 0)

    def _augmenting_path(self) -> Optional[List[int]]:
        parent = {self.s: None}
        queue = deque([self.s])
        while queue:
            node = queue.popleft()
            for neighbor in self.g.adjacency[node]:
                if neighbor in parent or self.residual(node, neighbor) <= 0:
                    continue
                parent[neighbor] = node
                if neighbor == self.t:
                    path = [neighbor]
                    while parent[path[-1]] is not None:
                        path.append(parent[path[-1]])
                    return path[::-1]
                queue.append(neighbor)
        return None

    def run(self) -> '_UnitFlow':
        while True:
            path = self._augmenting_path()
            if path is None:
                return self
            for u, v in zip(path, path[1:]):
                self.flow[(u, v)] = self.flow.get((u, v), 0) + 1
                self.flow[(v, u)] = self.flow.get((v, u), 0) - 1
            self.value += 1

    def source_side(self) -> Set[int]:
        """Nodes reachable from s in the residual graph."""
        seen = {self.s}
        queue = deque([self.s])
        while queue:
            node = queue.popleft()
            for neighbor in self.g.adjacency[node]:
                if neighbor not in seen and self.residual(node, neighbor) > 0:
                    seen.add(neighbor)
                    queue.append(neighbor)
        return seen

    def decompose(self) -> List[Path]:
        """Split the flow into s->t paths; loops left by the decomposition are dropped."""
        outgoing: Dict[int, List[int]] = {node: [] for node in range(self.g.node_count)}
        for (u, v), units in sorted(self.flow.items()):
            if units > 0:
                outgoing[u].append(v)
        paths = []
        for _ in range(self.value):
            nodes = [self.s]
            position = {self.s: 0}
            while nodes[-1] != self.t:
                node = nodes[-1]
                nxt = outgoing[node].pop(0)
                if nxt in position:
                    # Circulation: cut the loop back to the first visit
                    cut = position[nxt]
                    for dropped in nodes[cut + 1:]:
                        del position[dropped]
                    nodes = nodes[:cut + 1]
                else:
                    position[nxt] = len(nodes)
                    nodes.append(nxt)
            paths.append(Path(tuple(nodes)))
        return paths


def _checked_flow(g: NcsGraph, s: int, t: int) -> _UnitFlow:
    g._check_node(s)
    g._check_node(t)
    if s == t:
        raise InvalidGraphError(f"Source and sink must differ, both are {s}")
    return _UnitFlow(g, s, t).run()


def max_edge_disjoint_paths(g: NcsGraph, s: int, t: int) -> Tuple[int, List[Path]]:
    """
    Compute a maximum set of pairwise edge-disjoint s-t paths.

    Args:
        g: NCS graph (need not be connected)
        s: Source node
        t: Sink node

    Returns:
        Tuple (Z, paths) where Z equals the unit-capacity max-flow value

    Raises:
        InvalidGraphError: If s == t or either node is out of range
    """
    flow = _checked_flow(g, s, t)
    paths = flow.decompose()
    logger.debug("max_edge_disjoint_paths %s->%s: Z=%d", s, t, flow.value)
    return flow.value, paths


def min_edge_cut(g: NcsGraph, s: int, t: int) -> FrozenSet[Edge]:
    """
    Minimum set of edges separating s from t (Menger dual of the disjoint paths).

    Raises:
        InvalidGraphError: If s == t
    """
    flow = _checked_flow(g, s, t)
    side = flow.source_side()
    return frozenset(e for e in g.edges if (e.a in side) != (e.b in side))


def minimum_global_cut(g: NcsGraph) -> Tuple[int, FrozenSet[Edge]]:
    """
    Global minimum edge cut with one side fixed to the reference node.

    Returns:
        Tuple (lambda, cut) for the lowest sink t attaining the minimum

    Raises:
        InvalidGraphError: If the graph has fewer than two nodes
    """
    if g.node_count < 2:
        raise InvalidGraphError("Edge connectivity needs at least two nodes")
    best: Optional[FrozenSet[Edge]] = None
    for t in range(1, g.node_count):
        cut = min_edge_cut(g, REFERENCE_NODE, t)
        if best is None or len(cut) < len(best):
            best = cut
            if not best:
                break
    return len(best), best


def edge_connectivity(g: NcsGraph) -> int:
    """λ(g): 0 iff the graph is disconnected."""
    connectivity, _ = minimum_global_cut(g)
    return connectivity
