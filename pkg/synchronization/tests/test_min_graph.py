from django.test import SimpleTestCase, override_settings

from synchronization.exceptions import InfeasibleResilienceError, InvalidGraphError
from synchronization.services.bounds import k_resilient, min_degree_check
from synchronization.services.catalog import named_graph
from synchronization.services.min_graph import (
    degree_feasible_removals,
    greedy_min_degree_construction,
    minimum_ncs_graphs,
)

# (n, k) -> minimum edge count
MINIMUM_EDGE_COUNTS = {
    (5, 1): 8,
    (6, 1): 9,
    (6, 2): 15,
    (7, 1): 11,
    (7, 2): 18,
    (8, 3): 28,
}


class MinimumGraphTests(SimpleTestCase):

    def test_four_nodes(self):
        result = minimum_ncs_graphs(4, 1)
        self.assertEqual(result.edge_count, 6)
        self.assertEqual(result.survivor_count, 1)
        self.assertTrue(result.achieves_lower_bound)

    def test_edge_counts(self):
        for (n, k), edges in MINIMUM_EDGE_COUNTS.items():
            result = minimum_ncs_graphs(n, k, limit=4)
            self.assertEqual(result.edge_count, edges, (n, k))
            self.assertEqual(result.lower_bound, edges, (n, k))
            for g in result.graphs:
                self.assertEqual(g.edge_count, edges)
                self.assertTrue(k_resilient(g, k))
                self.assertTrue(min_degree_check(g, k))

    def test_five_nodes_contains_catalog_graph(self):
        result = minimum_ncs_graphs(5, 1, limit=20)
        self.assertEqual(result.survivor_count, 15)
        self.assertIn(named_graph('minimum-5-1'), result.graphs)

    def test_removing_any_edge_breaks_resilience(self):
        for n, k in [(5, 1), (6, 1), (7, 2)]:
            for g in minimum_ncs_graphs(n, k, limit=3).graphs:
                for edge in g.sorted_edges:
                    self.assertFalse(k_resilient(g.without_edges([edge]), k), (n, k, edge))

    def test_limit_keeps_survivor_count(self):
        result = minimum_ncs_graphs(6, 1, limit=2)
        self.assertEqual(len(result.graphs), 2)
        self.assertGreater(result.survivor_count, 2)

    def test_dedup(self):
        result = minimum_ncs_graphs(5, 1, dedup=True)
        self.assertEqual(result.isomorphism_classes, 1)
        self.assertEqual(len(result.graphs), 1)
        self.assertEqual(result.survivor_count, 15)
        self.assertIn('isomorphism_classes', result.to_dict())

    def test_infeasible(self):
        with self.assertRaises(InfeasibleResilienceError):
            minimum_ncs_graphs(4, 2)

    @override_settings(NCS_MIN_GRAPH_MAX_NODES=6)
    def test_node_cap(self):
        with self.assertRaises(InvalidGraphError):
            minimum_ncs_graphs(7, 1)


class DegreeFeasibleRemovalTests(SimpleTestCase):

    def test_nothing_to_remove(self):
        self.assertEqual(list(degree_feasible_removals(4, 1, 0)), [()])
        self.assertEqual(list(degree_feasible_removals(4, 1, 1)), [])

    def test_removals_are_matchings_when_slack_is_one(self):
        removals = list(degree_feasible_removals(5, 1, 2))
        self.assertEqual(len(removals), 15)
        for removed in removals:
            nodes = [v for e in removed for v in (e.a, e.b)]
            self.assertEqual(len(nodes), len(set(nodes)))
        self.assertEqual(removals, sorted(removals))


class GreedyConstructionTests(SimpleTestCase):

    def test_even_nodes_regular(self):
        g = greedy_min_degree_construction(6, 1)
        self.assertEqual(g.edge_count, 9)
        self.assertEqual(g.degrees(), [3] * 6)

    def test_odd_nodes(self):
        g = greedy_min_degree_construction(5, 1)
        self.assertEqual(g.edge_count, 8)
        self.assertEqual(sorted(g.degrees()), [3, 3, 3, 3, 4])

    def test_four_nodes_is_complete(self):
        self.assertEqual(greedy_min_degree_construction(4, 1).edge_count, 6)

    def test_infeasible(self):
        with self.assertRaises(InfeasibleResilienceError):
            greedy_min_degree_construction(5, 2)
