"""
Django management command to synthesize minimum K-resilient NCS graphs.
"""
from synchronization.conf import get_setting
from synchronization.management.commands._base import NcsCommand
from synchronization.services.min_graph import minimum_ncs_graphs


class Command(NcsCommand):
    help = 'Search minimum NCS graphs on N nodes that are K-resilient'

    def add_arguments(self, parser):
        parser.add_argument('--nodes', type=int, required=True, help='Number of nodes N')
        parser.add_argument('--k', type=int, required=True, help='Target resilience K')
        parser.add_argument(
            '--dedup',
            action='store_true',
            help='Return one graph per isomorphism class'
        )
        parser.add_argument(
            '--limit',
            type=int,
            default=None,
            help=f"Maximum graphs listed (default: {get_setting('NCS_MIN_GRAPH_LIMIT')})"
        )
        self.add_output_argument(parser)

    def run(self, *args, **options):
        result = minimum_ncs_graphs(
            options['nodes'], options['k'], limit=options['limit'], dedup=options['dedup']
        )
        self.status(
            f'{result.survivor_count} survivor(s) with {result.edge_count} edges', options
        )
        return self.as_json(result.to_dict())
