from itertools import combinations

from django.test import SimpleTestCase

from synchronization.exceptions import DisconnectedGraphError, InvalidGraphError
from synchronization.services.bounds import (
    bound_from_connectivity,
    edge_count_lower_bound,
    k_resilient,
    min_degree_check,
    tight_bound,
    tight_bound_complete,
    tight_bound_enumeration_oracle,
)
from synchronization.services.catalog import (
    MINIMUM_GRAPHS,
    SPARSE_8_UNREPAIRED,
    SPARSE_GRAPHS,
    complete_graph,
    graph_corpus,
    named_graph,
    path_graph,
    star_graph,
)
from synchronization.services.graph_core import NcsGraph, is_connected_after_removal


class CompleteGraphBoundTests(SimpleTestCase):

    def test_closed_form(self):
        self.assertEqual(tight_bound_complete(3), 0)
        self.assertEqual(tight_bound_complete(4), 1)
        self.assertEqual(tight_bound_complete(5), 1)
        self.assertEqual(tight_bound_complete(16), 7)

    def test_too_few_nodes(self):
        with self.assertRaises(InvalidGraphError):
            tight_bound_complete(1)

    def test_connectivity_bound_matches_closed_form(self):
        for n in range(2, 10):
            self.assertEqual(tight_bound(complete_graph(n)).tight_bound, tight_bound_complete(n))

    def test_oracle_matches_closed_form(self):
        for n in range(2, 7):
            self.assertEqual(tight_bound_enumeration_oracle(complete_graph(n)),
                             tight_bound_complete(n))

    def test_removals_within_bound_keep_complete_graph_connected(self):
        for n in range(3, 8):
            g = complete_graph(n)
            budget = 2 * tight_bound_complete(n)
            for size in range(budget + 1):
                for removed in combinations(g.sorted_edges, size):
                    self.assertTrue(is_connected_after_removal(g, removed))


class GraphBoundTests(SimpleTestCase):

    def test_catalog_graphs(self):
        for name, (_, _, bound) in SPARSE_GRAPHS.items():
            self.assertEqual(tight_bound(named_graph(name)).tight_bound, bound, name)

    def test_catalog_minimum_graphs_reach_their_resilience(self):
        for name, (_, _, k) in MINIMUM_GRAPHS.items():
            self.assertTrue(k_resilient(named_graph(name), k), name)

    def test_eight_node_graph_without_restored_session(self):
        node_count, edges = SPARSE_8_UNREPAIRED
        g = NcsGraph.from_pairs(node_count, edges)
        self.assertEqual(tight_bound(g).tight_bound, 1)

    def test_report(self):
        report = tight_bound(complete_graph(4))
        self.assertEqual(report.edge_connectivity, 3)
        self.assertEqual(report.tight_bound, 1)
        self.assertEqual(len(report.witness_cut), 3)
        self.assertFalse(is_connected_after_removal(complete_graph(4), report.witness_cut))
        self.assertEqual(sorted(report.to_dict()), ['edge_connectivity', 'tight_bound', 'witness_cut'])

    def test_star_and_path(self):
        self.assertEqual(tight_bound(star_graph(6)).tight_bound, 0)
        self.assertEqual(tight_bound(path_graph(4)).tight_bound, 0)

    def test_disconnected(self):
        g = NcsGraph.from_pairs(4, [(0, 1), (2, 3)])
        with self.assertRaises(DisconnectedGraphError):
            tight_bound(g)
        with self.assertRaises(DisconnectedGraphError):
            tight_bound_enumeration_oracle(g)

    def test_bound_from_connectivity(self):
        self.assertEqual([bound_from_connectivity(c) for c in range(1, 8)], [0, 0, 1, 1, 2, 2, 3])


class OracleAgreementTests(SimpleTestCase):

    def test_corpus(self):
        corpus = graph_corpus(max_nodes=6)
        self.assertGreaterEqual(len(corpus), 30)
        for name, g in corpus.items():
            self.assertEqual(tight_bound(g).tight_bound, tight_bound_enumeration_oracle(g), name)


class NecessaryConditionTests(SimpleTestCase):

    def test_lower_bound_values(self):
        self.assertEqual(edge_count_lower_bound(4, 1), 6)
        self.assertEqual(edge_count_lower_bound(5, 1), 8)
        self.assertEqual(edge_count_lower_bound(7, 1), 11)
        self.assertEqual(edge_count_lower_bound(7, 2), 18)
        self.assertEqual(edge_count_lower_bound(16, 5), 88)

    def test_resilience_implies_degree_and_edge_count(self):
        for name, g in graph_corpus(max_nodes=6).items():
            for k in range(4):
                if k_resilient(g, k):
                    self.assertTrue(min_degree_check(g, k), name)
                    self.assertGreaterEqual(g.edge_count, edge_count_lower_bound(g.node_count, k), name)

    def test_k_resilient(self):
        self.assertTrue(k_resilient(complete_graph(4), 1))
        self.assertFalse(k_resilient(complete_graph(5), 2))
        self.assertTrue(k_resilient(path_graph(3), 0))
        self.assertFalse(k_resilient(NcsGraph(1, frozenset()), 0))

    def test_min_degree_check(self):
        self.assertTrue(min_degree_check(complete_graph(4), 1))
        self.assertFalse(min_degree_check(complete_graph(4), 2))
        self.assertTrue(min_degree_check(complete_graph(8), 3))
        self.assertTrue(min_degree_check(named_graph('minimum-8-3'), 3))
        self.assertFalse(min_degree_check(complete_graph(8), 4))
        self.assertFalse(min_degree_check(star_graph(5), 1))
