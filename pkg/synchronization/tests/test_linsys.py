from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase

from synchronization.exceptions import MeasurementMismatchError, RankDeficientError
from synchronization.services.catalog import complete_graph, graph_corpus
from synchronization.services.graph_core import Edge, NcsGraph
from synchronization.services.linsys import (
    ClockState,
    FaultDistribution,
    MeasurementSet,
    SolveStatus,
    build_system,
    classify_and_solve,
    least_squares_fit,
    residual_least_squares,
    solve_distribution,
)
from synchronization.services.simulation import FaultMap, NoiseModel, generate_round, trial_rng

F = Fraction


def as_int_matrix(matrix):
    return [[int(v) for v in row] for row in matrix]


class BuildSystemTests(SimpleTestCase):

    def setUp(self):
        self.truth = ClockState.of([F(3, 2), F(-2), F(7, 4)])

    def test_triangle_with_assumed_reference_session(self):
        k3 = complete_graph(3)
        truth = ClockState.of([F(3, 2), F(-2)])
        m = generate_round(k3, truth, FaultMap({Edge(1, 2): F(7, 3)}))
        a, b = build_system(k3, m, FaultDistribution.of([Edge(0, 1)]))
        # Rows (0,1), (0,2), (1,2); columns x1, x2, e01
        self.assertEqual(as_int_matrix(a), [[-1, 0, 1], [0, -1, 0], [1, -1, 0]])
        self.assertEqual(list(b), [F(-3, 2), F(2), F(3, 2) + 2 + F(7, 3)])

    def test_four_nodes_with_one_assumed_fault(self):
        k4 = complete_graph(4)
        m = generate_round(k4, self.truth, FaultMap())
        system = build_system(k4, m, FaultDistribution.of([Edge(0, 1)]))
        self.assertEqual(system.matrix.shape, (6, 4))
        self.assertEqual(as_int_matrix(system.matrix), [
            [-1, 0, 0, 1],
            [0, -1, 0, 0],
            [0, 0, -1, 0],
            [1, -1, 0, 0],
            [1, 0, -1, 0],
            [0, 1, -1, 0],
        ])

    def test_zero_round_gives_incidence_matrix(self):
        k3 = complete_graph(3)
        m = generate_round(k3, ClockState.zeros(3), FaultMap())
        a, b = build_system(k3, m, FaultDistribution())
        self.assertEqual(as_int_matrix(a), [[-1, 0], [0, -1], [1, -1]])
        self.assertTrue(all(v == 0 for v in b))

    def test_shape_and_entries(self):
        for g in graph_corpus(max_nodes=5).values():
            m = generate_round(g, ClockState.zeros(g.node_count), FaultMap())
            assumed = g.sorted_edges[:2]
            a, _ = build_system(g, m, FaultDistribution.of(assumed))
            self.assertEqual(a.shape, (g.edge_count, g.node_count - 1 + len(assumed)))
            self.assertTrue(set(a.ravel()) <= {-1, 0, 1})

    def test_sign_convention_round_trip(self):
        k4 = complete_graph(4)
        m = generate_round(k4, self.truth, FaultMap())
        system = build_system(k4, m, FaultDistribution())
        for edge, value in zip(system.rows, system.rhs):
            self.assertEqual(value, self.truth.offset(edge.a) - self.truth.offset(edge.b))

    def test_measurement_mismatch(self):
        k3 = complete_graph(3)
        m = MeasurementSet.of({Edge(0, 1): 1, Edge(0, 2): 2})
        with self.assertRaises(MeasurementMismatchError):
            build_system(k3, m, FaultDistribution())


class ClassifyAndSolveTests(SimpleTestCase):
    """Systems written in larger-minus-smaller orientation, solved as plain linear algebra."""

    d10, d20, d30 = F(3, 2), F(-2), F(5, 4)

    def test_triangle_wrong_unique_solution(self):
        e21 = F(7, 3)
        a = [[1, 0, 1], [0, 1, 0], [-1, 1, 0]]
        b = [self.d10, self.d20, self.d20 - self.d10 + e21]
        outcome = classify_and_solve(a, b)
        self.assertEqual(outcome.status, SolveStatus.UNIQUE)
        self.assertEqual(outcome.values, (self.d10 - e21, self.d20, e21))

    def four_node_system(self, e10, e20):
        a = [
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, 1, 1],
            [-1, 1, 0, 0],
            [0, -1, 1, 0],
            [-1, 0, 1, 0],
        ]
        b = [self.d10 + e10, self.d20 + e20, self.d30, self.d20 - self.d10,
             self.d30 - self.d20, self.d30 - self.d10]
        return a, b

    def test_equal_faults_shift_every_offset(self):
        e = F(4)
        outcome = classify_and_solve(*self.four_node_system(e, e))
        self.assertEqual(outcome.status, SolveStatus.UNIQUE)
        self.assertEqual(outcome.values, (self.d10 + e, self.d20 + e, self.d30 + e, -e))

    def test_unequal_faults_have_no_solution(self):
        outcome = classify_and_solve(*self.four_node_system(F(4), F(1)))
        self.assertEqual(outcome.status, SolveStatus.NO_SOLUTION)
        self.assertNotEqual(outcome.rank, outcome.augmented_rank)

    def test_two_assumed_faults_wrong_unique_solution(self):
        e10, e20 = F(4), F(-9, 2)
        a = [
            [1, 0, 0, 1, 0],
            [0, 1, 0, 0, 0],
            [0, 0, 1, 0, 1],
            [-1, 1, 0, 0, 0],
            [0, -1, 1, 0, 0],
            [-1, 0, 1, 0, 0],
        ]
        b = [self.d10 + e10, self.d20 + e20, self.d30, self.d20 - self.d10,
             self.d30 - self.d20, self.d30 - self.d10]
        outcome = classify_and_solve(a, b)
        self.assertEqual(outcome.status, SolveStatus.UNIQUE)
        self.assertEqual(outcome.values,
                         (self.d10 + e20, self.d20 + e20, self.d30 + e20, e10 - e20, -e20))

    def test_underdetermined(self):
        outcome = classify_and_solve([[1, -1], [2, -2]], [1, 2])
        self.assertEqual(outcome.status, SolveStatus.UNDERDETERMINED)
        self.assertIsNone(outcome.values)

    def test_float_input_is_solved_exactly(self):
        outcome = classify_and_solve(np.array([[2.0, 0.0], [0.0, 4.0]]), np.array([1.0, 1.0]))
        self.assertEqual(outcome.values, (F(1, 2), F(1, 4)))


class SolveDistributionTests(SimpleTestCase):

    def test_zero_faults_recovers_truth_on_connected_graphs(self):
        for name, g in graph_corpus(max_nodes=5).items():
            rng = trial_rng(3, g.node_count)
            truth = ClockState.of([F(int(rng.integers(-50, 50)), 4) for _ in range(g.node_count - 1)])
            m = generate_round(g, truth, FaultMap())
            outcome, solution = solve_distribution(g, m, FaultDistribution())
            self.assertEqual(outcome.status, SolveStatus.UNIQUE, name)
            self.assertEqual(solution.offsets, truth.offsets, name)

    def test_zero_faults_on_disconnected_graph_is_underdetermined(self):
        g = NcsGraph.from_pairs(4, [(0, 1), (2, 3)])
        m = generate_round(g, ClockState.of([1, 2, 3]), FaultMap())
        outcome, solution = solve_distribution(g, m, FaultDistribution())
        self.assertEqual(outcome.status, SolveStatus.UNDERDETERMINED)
        self.assertIsNone(solution)

    def test_exact_solution_satisfies_every_equation(self):
        k4 = complete_graph(4)
        m = generate_round(k4, ClockState.of([F(1, 3), F(2), F(-5, 7)]),
                           FaultMap({Edge(1, 3): F(11, 2)}))
        system = build_system(k4, m, FaultDistribution.of([Edge(1, 3)]))
        outcome = classify_and_solve(system.matrix, system.rhs)
        residual = system.matrix.dot(np.array(outcome.values, dtype=object)) - system.rhs
        self.assertTrue(all(v == 0 for v in residual))


class ResidualLeastSquaresTests(SimpleTestCase):

    def setUp(self):
        self.k4 = complete_graph(4)
        self.truth = ClockState.of([1.5, -2.0, 4.25])

    def test_noise_free_correct_distribution(self):
        m = generate_round(self.k4, self.truth, FaultMap({Edge(0, 2): 5.0}))
        solution, residuals = residual_least_squares(self.k4, m, FaultDistribution.of([Edge(0, 2)]))
        for value in residuals.values():
            self.assertAlmostEqual(value, 0.0, places=9)
        for estimate, true in zip(solution.offsets, self.truth.offsets):
            self.assertAlmostEqual(estimate, true, places=9)
        self.assertAlmostEqual(solution.fault_estimates[Edge(0, 2)], 5.0, places=9)

    def test_noisy_correct_distribution_passes_threshold(self):
        noise = NoiseModel(gaussian_sigma=1.0)
        passed = 0
        for seed in range(1000):
            m = generate_round(self.k4, self.truth, FaultMap({Edge(0, 2): 5.0}), noise, seed)
            _, residuals = residual_least_squares(self.k4, m, FaultDistribution.of([Edge(0, 2)]))
            passed += max(residuals.values()) <= noise.threshold_eta
        self.assertGreaterEqual(passed / 1000, 0.8)

    def test_wrong_distribution_exceeds_threshold(self):
        for fault in (6.0, 8.0, -7.0):
            m = generate_round(self.k4, self.truth, FaultMap({Edge(0, 2): fault}))
            _, residuals = residual_least_squares(self.k4, m, FaultDistribution.of([Edge(0, 1)]))
            self.assertGreater(max(residuals.values()), 2.0)

    def test_rank_deficient_system(self):
        m = generate_round(self.k4, self.truth, FaultMap())
        with self.assertRaises(RankDeficientError):
            residual_least_squares(self.k4, m, FaultDistribution.of([Edge(0, 1), Edge(0, 2), Edge(0, 3)]))

    def test_leverages_and_deleted_residuals(self):
        m = generate_round(self.k4, self.truth, FaultMap({Edge(1, 2): 3.0}))
        fit = least_squares_fit(self.k4, m, FaultDistribution())
        for leverage in fit.leverages.values():
            self.assertAlmostEqual(leverage, 0.5, places=9)
        self.assertAlmostEqual(fit.residuals[Edge(1, 2)], 1.5, places=9)
        self.assertAlmostEqual(fit.max_abs_residual, 1.5, places=9)
        deleted = fit.deleted_residuals()
        self.assertAlmostEqual(deleted[Edge(1, 2)], 3.0, places=9)
        self.assertAlmostEqual(deleted[Edge(0, 3)], 0.0, places=9)
        for edge in (Edge(0, 1), Edge(0, 2), Edge(1, 3), Edge(2, 3)):
            self.assertAlmostEqual(abs(deleted[edge]), 1.5, places=9)
        self.assertTrue(fit.faults_exceed(2.0))

    def test_assumed_sessions_have_no_deleted_residual(self):
        m = generate_round(self.k4, self.truth, FaultMap({Edge(1, 2): 3.0}))
        fit = least_squares_fit(self.k4, m, FaultDistribution.of([Edge(1, 2)]))
        self.assertNotIn(Edge(1, 2), fit.deleted_residuals())
        self.assertAlmostEqual(fit.sum_of_squares, 0.0, places=12)
        self.assertTrue(fit.faults_exceed(2.0))
        self.assertFalse(fit.faults_exceed(4.0))
