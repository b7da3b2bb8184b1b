"""
Django management command to plan a tiered 4-node-group synchronization architecture.
"""
from synchronization.management.commands._base import NcsCommand
from synchronization.services.tiered import build_tiered_plan


class Command(NcsCommand):
    help = 'Print the tiered group plan for N nodes with the flat edge lower bound for comparison'

    def add_arguments(self, parser):
        parser.add_argument('--nodes', type=int, required=True, help='Number of nodes N (>= 4)')
        self.add_output_argument(parser)

    def run(self, *args, **options):
        plan = build_tiered_plan(options['nodes'])
        return self.as_json(plan.to_dict())
