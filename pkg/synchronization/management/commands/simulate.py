"""
Django management command to run a seeded noisy fault-injection campaign.
"""
import math

from django.core.management.base import CommandError

from synchronization.conf import get_setting
from synchronization.management.commands._base import NcsCommand
from synchronization.services.graph_io import load_graph
from synchronization.services.reporting import campaign_csv, campaign_figure, summarize_campaign
from synchronization.services.simulation import NoiseModel, run_campaign
from synchronization.services.solvers import Algorithm


def parse_fault_counts(raw: str) -> list[int]:
    try:
        counts = [int(part) for part in raw.split(',') if part.strip()]
    except ValueError:
        raise CommandError(f"--faults expects comma-separated integers, got {raw!r}", returncode=2)
    if not counts:
        raise CommandError("--faults needs at least one fault count", returncode=2)
    return counts


def _finite(value):
    """JSON-safe scalar: numpy scalars unboxed, NaN and infinities as null."""
    if hasattr(value, 'item'):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


class Command(NcsCommand):
    help = 'Run noisy simulation trials and report identical-distribution flags and offset MSE'

    def add_arguments(self, parser):
        parser.add_argument('--graph', required=True, help='Graph file')
        parser.add_argument('--faults', default='1', help='Comma-separated fault counts (default: 1)')
        parser.add_argument('--trials', type=int, default=100, help='Trials per fault count (default: 100)')
        parser.add_argument('--seed', type=int, default=0, help='Campaign seed (default: 0)')
        parser.add_argument('--sigma', type=float, default=None, help='Gaussian noise sigma')
        parser.add_argument('--fmin', type=float, default=None, help='Smallest fault magnitude')
        parser.add_argument('--fmax', type=float, default=None, help='Largest fault magnitude')
        parser.add_argument('--eta', type=float, default=None, help='Residual threshold')
        parser.add_argument(
            '--algorithm',
            choices=[a.value for a in Algorithm],
            default=Algorithm.FAST.value,
            help='Solver used in every trial (default: fast)'
        )
        parser.add_argument('--format', choices=['json', 'csv'], default='json', help='Output format')
        parser.add_argument(
            '--summary',
            action='store_true',
            help='Print the per-fault-count summary instead of individual trials'
        )
        parser.add_argument('--plot', help='Also write an HTML box plot of MSE to this path')
        parser.add_argument(
            '--workers',
            type=int,
            default=None,
            help='Worker processes (default: NCS_THREADS, 0 = all cores)'
        )
        self.add_output_argument(parser)

    def run(self, *args, **options):
        graph = load_graph(options['graph'])
        fault_counts = parse_fault_counts(options['faults'])

        overrides = {}
        if options['sigma'] is not None:
            overrides['gaussian_sigma'] = options['sigma']
        if options['eta'] is not None:
            overrides['threshold_eta'] = options['eta']
        if options['fmin'] is not None or options['fmax'] is not None:
            overrides['fault_magnitude_range'] = (
                options['fmin'] if options['fmin'] is not None else get_setting('NCS_FAULT_MIN'),
                options['fmax'] if options['fmax'] is not None else get_setting('NCS_FAULT_MAX'),
            )
        noise = NoiseModel.from_settings(**overrides)

        records = run_campaign(
            graph, noise, fault_counts, options['trials'], options['seed'],
            solver=Algorithm(options['algorithm']), workers=options['workers'],
        )
        self.status(f'Ran {len(records)} trial(s)', options)

        if options['plot']:
            campaign_figure(records).write_html(options['plot'], include_plotlyjs='cdn')
            self.status(f"Wrote {options['plot']}", options)

        if options['summary']:
            summary = summarize_campaign(records)
            if options['format'] == 'csv':
                return summary.to_csv(index=False)
            rows = [{k: _finite(v) for k, v in row.items()} for row in summary.to_dict('records')]
            return self.as_json({'summary': rows})

        if options['format'] == 'csv':
            return campaign_csv(records)
        trials = []
        for record in records:
            row = record.to_dict()
            row['mse'] = _finite(row['mse'])
            trials.append(row)
        return self.as_json({'trials': trials})
