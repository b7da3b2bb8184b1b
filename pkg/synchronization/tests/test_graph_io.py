import json
import os
import tempfile
from fractions import Fraction

from django.test import SimpleTestCase

from synchronization.exceptions import InvalidGraphError, MeasurementMismatchError, NcsFileError
from synchronization.services.catalog import complete_graph, named_graph
from synchronization.services.graph_core import Edge
from synchronization.services.graph_io import (
    dump_json,
    format_value,
    graph_to_dict,
    load_graph,
    load_measurements,
    load_truth,
    measurements_to_dict,
    parse_value,
    result_to_dict,
    truth_to_dict,
    write_text,
)
from synchronization.services.linsys import ClockState
from synchronization.services.simulation import FaultMap, generate_round
from synchronization.services.solvers import ncs_exhaustive

F = Fraction


class ValueFormatTests(SimpleTestCase):

    def test_format_value(self):
        self.assertEqual(format_value(F(5, 4)), '1.25')
        self.assertEqual(format_value(F(-3)), '-3')
        self.assertEqual(format_value(F(0)), '0')
        self.assertEqual(format_value(F(1, 1024)), '0.0009765625')
        self.assertEqual(format_value(F(1, 3)), '1/3')
        self.assertEqual(format_value(2.5), 2.5)

    def test_parse_value(self):
        self.assertEqual(parse_value('1.25', exact=True), F(5, 4))
        self.assertEqual(parse_value('1/3', exact=True), F(1, 3))
        self.assertEqual(parse_value(2.5, exact=True), F(5, 2))
        self.assertEqual(parse_value(7, exact=True), F(7))
        self.assertEqual(parse_value('1/4', exact=False), 0.25)

    def test_parse_invalid(self):
        for raw in ('abc', None, True, '1/0'):
            with self.assertRaises(NcsFileError):
                parse_value(raw, exact=True)

    def test_dump_json_is_canonical(self):
        self.assertEqual(dump_json({'b': 1, 'a': [1, 2]}), '{\n  "a": [\n    1,\n    2\n  ],\n  "b": 1\n}\n')


class FileTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def write(self, name, text):
        write_text(self.path(name), text)
        return self.path(name)

    def test_json_graph(self):
        g = named_graph('sparse-6a')
        path = self.write('g.json', dump_json(graph_to_dict(g)))
        self.assertEqual(load_graph(path), g)

    def test_edge_list(self):
        path = self.write('g.txt', '# triangle\n0 1\n1 2\n2 0  # closing edge\n\n')
        self.assertEqual(load_graph(path), complete_graph(3))

    def test_edge_list_errors(self):
        with self.assertRaises(NcsFileError):
            load_graph(self.write('bad.txt', '0 1 2\n'))
        with self.assertRaises(NcsFileError):
            load_graph(self.write('empty.txt', '# nothing\n'))
        with self.assertRaises(InvalidGraphError):
            load_graph(self.write('dup.txt', '0 1\n1 0\n'))

    def test_json_graph_errors(self):
        with self.assertRaises(InvalidGraphError):
            load_graph(self.write('rev.json', '{"nodes": 3, "edges": [[2, 1]]}'))
        with self.assertRaises(NcsFileError):
            load_graph(self.write('broken.json', '{"nodes": 3'))
        with self.assertRaises(NcsFileError):
            load_graph(self.write('missing.json', '{"nodes": 3}'))

    def test_missing_file(self):
        with self.assertRaises(FileNotFoundError):
            load_graph(self.path('nope.json'))

    def test_measurement_round_trip(self):
        g = complete_graph(4)
        m = generate_round(g, ClockState.of([F(1, 3), F(-2), F(7, 8)]), FaultMap({Edge(0, 2): F(5)}))
        path = self.write('m.json', dump_json(measurements_to_dict(g, m)))
        loaded_graph, loaded = load_measurements(path)
        self.assertEqual(loaded_graph, g)
        self.assertEqual(loaded, m)

    def test_measurements_must_cover_edges(self):
        payload = {'graph': {'nodes': 3, 'edges': [[0, 1], [1, 2]]}, 'measurements': [[0, 1, 1]]}
        with self.assertRaises(MeasurementMismatchError):
            load_measurements(self.write('short.json', json.dumps(payload)))

    def test_noisy_measurements_are_floats(self):
        payload = {'graph': {'nodes': 2, 'edges': [[0, 1]]}, 'measurements': [[0, 1, '1/2']]}
        _, m = load_measurements(self.write('noisy.json', json.dumps(payload)), exact=False)
        self.assertEqual(m.value(Edge(0, 1)), 0.5)
        self.assertFalse(m.exact)

    def test_truth_round_trip(self):
        truth = ClockState.of([F(1, 3), F(5, 2)])
        path = self.write('t.json', dump_json(truth_to_dict(truth, {Edge(0, 1): F(2)})))
        self.assertEqual(load_truth(path), truth)

    def test_result_to_dict(self):
        g = complete_graph(4)
        m = generate_round(g, ClockState.of([F(1, 2), F(1), F(3, 2)]), FaultMap({Edge(1, 3): F(-4)}))
        payload = result_to_dict(ncs_exhaustive(g, m))
        self.assertEqual(payload['offsets'], ['0.5', '1', '1.5'])
        self.assertEqual(payload['faults'], [[1, 3, '-4']])
        self.assertEqual(payload['assumed_distribution'], [[1, 3]])
        self.assertTrue(payload['exact'])
