from core import texts
from core.enums import RngIds
from correspondence.loaders import load_instance
from kinetics.statistics import mixing_scaling
from runs.mixins import RunCommand
from runs.serializers import MixingScanSerializer


class Command(RunCommand):
    help = 'Рост времени выхода на равновесие с численностью N.'
    serializer_class = MixingScanSerializer

    def add_run_arguments(self, parser) -> None:
        parser.add_argument('--margins', help=texts.HELP_MARGINS)
        parser.add_argument('--costs', help=texts.HELP_COSTS)
        parser.add_argument('--beta', type=float, help=texts.HELP_BETA)
        parser.add_argument('--grid', help=texts.HELP_GRID)
        parser.add_argument('--seeds', type=int, help=texts.HELP_SEEDS)
        parser.add_argument('--seed', type=int, help=texts.HELP_SEED)
        parser.add_argument(
            '--lambda', dest='lam', type=float, help=texts.HELP_LAMBDA
        )
        parser.add_argument(
            '--start', choices=['corner', 'dstar'], help=texts.HELP_START
        )
        parser.add_argument('--horizon', type=int, help=texts.HELP_HORIZON)
        parser.add_argument('--workers', type=int, help=texts.HELP_WORKERS)

    def run(self, config, writer) -> bool:
        inst = load_instance(config['margins'], config['costs'], config)
        report = mixing_scaling(
            inst,
            config['grid'],
            seeds=config['seeds'],
            seed=config['seed'],
            lam=config['lam'],
            start=config['start'],
            horizon_events=config.get('horizon'),
            workers=config['workers'],
        )
        writer.table('mixing.csv', report.to_frame())
        writer.meta['rng_id'] = RngIds.PCG64.value
        writer.report('slope', report.slope)
        writer.report('intercept', report.intercept)
        writer.report('degenerate', report.degenerate)
        writer.report('scaling', 'PASS' if report.passed else 'FAIL')
        return report.passed
