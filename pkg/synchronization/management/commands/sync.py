"""
Django management command to synchronize one measurement round with fault correction.
"""
from synchronization.conf import get_setting
from synchronization.management.commands._base import NcsCommand
from synchronization.services.graph_io import load_measurements, result_to_dict
from synchronization.services.solvers import Algorithm, SolveMode, synchronize


class Command(NcsCommand):
    help = 'Estimate clock offsets and session faults from a measurement file'

    def add_arguments(self, parser):
        parser.add_argument('measurements', help='Measurement file (JSON with graph and measurements)')
        parser.add_argument(
            '--algorithm',
            choices=[a.value for a in Algorithm],
            default=Algorithm.FAST.value,
            help='exhaustive distribution search or fast path voting (default: fast)'
        )
        parser.add_argument(
            '--mode',
            choices=[m.value for m in SolveMode],
            default=SolveMode.EXACT.value,
            help='exact rational arithmetic or noisy least squares (default: exact)'
        )
        parser.add_argument(
            '--eta',
            type=float,
            default=None,
            help=f"Residual threshold for noisy mode (default: {get_setting('NCS_DEFAULT_ETA')})"
        )
        self.add_output_argument(parser)

    def run(self, *args, **options):
        mode = SolveMode(options['mode'])
        algorithm = Algorithm(options['algorithm'])
        eta = options['eta'] if options['eta'] is not None else get_setting('NCS_DEFAULT_ETA')

        graph, measurements = load_measurements(options['measurements'], exact=mode is SolveMode.EXACT)
        result = synchronize(graph, measurements, algorithm, mode, eta)
        self.status(
            f'{algorithm.value}: {len(result.fault_estimates)} fault(s) after '
            f'{result.iterations_examined} iteration(s)',
            options,
        )
        return self.as_json(result_to_dict(result))
