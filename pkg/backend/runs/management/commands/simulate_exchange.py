import numpy as np
import pandas as pd
from core import texts
from correspondence.loaders import load_instance
from correspondence.solver import solve_sinkhorn
from kinetics.models import KineticsState
from kinetics.simulator import simulate
from kinetics.stationary import (occupation_law, stationary_exact,
                                 total_variation)
from kinetics.statistics import (concentration_test, corner_state,
                                 rounded_state, trajectory_frame)
from runs.mixins import RunCommand
from runs.serializers import SimulateExchangeSerializer


class Command(RunCommand):
    help = (
        'Моделирование обменов квартирами и проверка концентрации '
        'около равновесной матрицы.'
    )
    serializer_class = SimulateExchangeSerializer

    def add_run_arguments(self, parser) -> None:
        parser.add_argument('--margins', help=texts.HELP_MARGINS)
        parser.add_argument('--costs', help=texts.HELP_COSTS)
        parser.add_argument('--beta', type=float, help=texts.HELP_BETA)
        parser.add_argument(
            '--lambda', dest='lam', type=float, help=texts.HELP_LAMBDA
        )
        parser.add_argument('--events', type=int, help=texts.HELP_EVENTS)
        parser.add_argument(
            '--sample-every', type=int, help=texts.HELP_SAMPLE_EVERY
        )
        parser.add_argument('--seed', type=int, help=texts.HELP_SEED)
        parser.add_argument('--sigma', type=float, help=texts.HELP_SIGMA)
        parser.add_argument('--burn-in', type=int, help=texts.HELP_BURN_IN)
        parser.add_argument(
            '--start', choices=['dstar', 'corner'], help=texts.HELP_START
        )
        parser.add_argument(
            '--states', action='store_true', default=None,
            help=texts.HELP_STATES,
        )
        parser.add_argument(
            '--exact', action='store_true', default=None,
            help=texts.HELP_EXACT,
        )

    def run(self, config, writer) -> bool:
        inst = load_instance(config['margins'], config['costs'], config)
        d_star = solve_sinkhorn(inst).d_star
        if config['start'] == 'corner':
            d0 = corner_state(inst, d_star)
        else:
            d0 = rounded_state(inst, d_star)

        traj = simulate(
            inst,
            KineticsState(d0),
            config['lam'],
            config['events'],
            config['sample_every'],
            config['seed'],
            track_occupation=config['exact'],
        )
        report = concentration_test(
            traj, d_star, config['sigma'], config.get('burn_in')
        )
        writer.table(
            'trajectory.csv',
            trajectory_frame(traj, d_star, include_state=config['states']),
        )
        writer.meta.update({
            'rng_id': traj.rng_id,
            'events': traj.events,
            't_final': traj.samples[-1].t,
        })
        for key, value in (
            ('N', inst.N),
            ('events', traj.events),
            ('t_final', traj.samples[-1].t),
            ('sigma', report.sigma),
            ('radius', report.radius),
            ('samples', report.samples),
            ('exceedances', report.exceedances),
            ('frequency', report.frequency),
            ('allowed_exceedances', report.allowed),
            ('mean_distance', report.mean_distance),
            ('concentration', 'PASS' if report.passed else 'FAIL'),
        ):
            writer.report(key, value)

        if config['exact']:
            law = stationary_exact(inst)
            occupation = occupation_law(traj)
            writer.table('stationary.csv', law.to_frame())
            visited = sorted(occupation)
            frame = pd.DataFrame(visited, columns=law.to_frame().columns[:-1])
            frame['share'] = [occupation[state] for state in visited]
            writer.table('occupation.csv', frame)
            writer.report('states', len(law))
            writer.report(
                'total_variation', total_variation(law.as_dict(), occupation)
            )
            writer.report('mode_distance_l1', int(np.abs(
                law.mode() - rounded_state(inst, d_star)
            ).sum()))
        return report.passed
