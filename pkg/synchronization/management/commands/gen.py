"""
Django management command to generate graphs and synthetic measurement rounds.
"""
from django.core.management.base import CommandError

from synchronization.conf import get_setting
from synchronization.management.commands._base import NcsCommand
from synchronization.services.catalog import FAMILIES, family_graph, named_graph
from synchronization.services.graph_core import Edge
from synchronization.services.graph_io import (
    graph_to_dict,
    load_graph,
    measurements_to_dict,
    parse_value,
    truth_to_dict,
    write_text,
)
from synchronization.services.min_graph import greedy_min_degree_construction, minimum_ncs_graphs
from synchronization.services.simulation import (
    FaultMap,
    NoiseModel,
    generate_round,
    random_truth,
    sample_fault_map,
    trial_rng,
)

GRAPH_KINDS = list(FAMILIES) + ['catalog', 'greedy', 'minimum']


def parse_fault_spec(raw: str, exact: bool) -> dict:
    """Parse "a-b:value,a-b:value" into an edge -> value map."""
    faults = {}
    for item in raw.split(','):
        item = item.strip()
        if not item:
            continue
        try:
            pair, value = item.split(':', 1)
            a, b = (int(v) for v in pair.split('-'))
        except ValueError:
            raise CommandError(f"Fault entries look like '0-2:5', got {item!r}", returncode=2)
        faults[Edge.of(a, b)] = parse_value(value, exact)
    return faults


class Command(NcsCommand):
    help = 'Generate an NCS graph or a synthetic measurement round with injected faults'

    def add_arguments(self, parser):
        parser.add_argument('what', choices=['graph', 'round'], help='What to generate')
        parser.add_argument('--kind', choices=GRAPH_KINDS, default='complete',
                            help='Graph family for "graph" (default: complete)')
        parser.add_argument('--nodes', type=int, help='Number of nodes')
        parser.add_argument('--k', type=int, default=1, help='Resilience for greedy/minimum graphs')
        parser.add_argument('--name', help='Catalog graph name for --kind catalog')
        parser.add_argument('--edge-list', action='store_true',
                            help='Emit graphs as a plain "a b" edge list instead of JSON')
        parser.add_argument('--graph', help='Graph file for "round"')
        parser.add_argument('--faults', default='', help='Explicit faults, e.g. "0-2:5,1-3:-2"')
        parser.add_argument('--fault-count', type=int, default=None,
                            help='Inject this many random faults instead of --faults')
        parser.add_argument('--mode', choices=['exact', 'noisy'], default='exact',
                            help='exact rationals or noisy floats (default: exact)')
        parser.add_argument('--sigma', type=float, default=None, help='Noise sigma in noisy mode')
        parser.add_argument('--seed', type=int, default=0, help='Random seed (default: 0)')
        parser.add_argument('--truth-output', help='Write true offsets and faults to this file')
        self.add_output_argument(parser)

    def run(self, *args, **options):
        if options['what'] == 'graph':
            return self.generate_graph(options)
        return self.generate_round(options)

    def generate_graph(self, options) -> str:
        kind = options['kind']
        if kind == 'catalog':
            if not options['name']:
                raise CommandError('--kind catalog needs --name', returncode=2)
            graph = named_graph(options['name'])
        else:
            if options['nodes'] is None:
                raise CommandError(f'--kind {kind} needs --nodes', returncode=2)
            if kind == 'greedy':
                graph = greedy_min_degree_construction(options['nodes'], options['k'])
            elif kind == 'minimum':
                graph = minimum_ncs_graphs(options['nodes'], options['k'], limit=1).graphs[0]
            else:
                graph = family_graph(kind, options['nodes'])
        if options['edge_list']:
            return ''.join(f'{e.a} {e.b}\n' for e in graph.sorted_edges)
        return self.as_json(graph_to_dict(graph))

    def generate_round(self, options) -> str:
        if not options['graph']:
            raise CommandError('"round" needs --graph', returncode=2)
        graph = load_graph(options['graph'])
        exact = options['mode'] == 'exact'
        rng = trial_rng(options['seed'])

        noise = None
        if not exact:
            overrides = {}
            if options['sigma'] is not None:
                overrides['gaussian_sigma'] = options['sigma']
            noise = NoiseModel.from_settings(**overrides)

        if options['fault_count'] is not None:
            if options['faults']:
                raise CommandError('Use either --faults or --fault-count', returncode=2)
            faults = sample_fault_map(graph, noise or NoiseModel.from_settings(), rng,
                                      options['fault_count'], exact=exact)
        else:
            faults = FaultMap(parse_fault_spec(options['faults'], exact))

        truth = random_truth(graph, rng, get_setting('NCS_OFFSET_RANGE'), exact=exact)
        measurements = generate_round(graph, truth, faults, noise, int(rng.integers(2 ** 32)))

        if options['truth_output']:
            write_text(options['truth_output'], self.as_json(truth_to_dict(truth, faults.faults)))
            self.status(f"Wrote {options['truth_output']}", options)
        return self.as_json(measurements_to_dict(graph, measurements))
