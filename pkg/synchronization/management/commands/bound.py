"""
Django management command to compute the tight resilience bound of an NCS graph.
"""
from synchronization.management.commands._base import NcsCommand
from synchronization.services.bounds import tight_bound, tight_bound_enumeration_oracle
from synchronization.services.graph_io import load_graph


class Command(NcsCommand):
    help = 'Print edge connectivity, tight bound of maximum resilience and a witness cut as JSON'

    def add_arguments(self, parser):
        parser.add_argument('graph', help='Graph file (JSON object or "a b" edge list)')
        parser.add_argument(
            '--oracle',
            action='store_true',
            help='Also run the combinatorial enumeration oracle (small graphs only)'
        )
        self.add_output_argument(parser)

    def run(self, *args, **options):
        graph = load_graph(options['graph'])
        report = tight_bound(graph)
        payload = report.to_dict()
        if options['oracle']:
            payload['oracle_tight_bound'] = tight_bound_enumeration_oracle(graph)
        self.status(f'lambda={report.edge_connectivity} K*={report.tight_bound}', options)
        return self.as_json(payload)
