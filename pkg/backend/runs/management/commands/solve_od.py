import numpy as np
import pandas as pd
from core import texts
from core.enums import Scale
from correspondence.loaders import load_instance, potentials_frame
from correspondence.solver import (beta_sweep, entropy, mean_trip_time,
                                   primal_dual_report, solve_sinkhorn)
from runs.mixins import RunCommand
from runs.serializers import SolveOdSerializer


class Command(RunCommand):
    help = 'Равновесная матрица корреспонденций (задача ЭЛП).'
    serializer_class = SolveOdSerializer

    def add_run_arguments(self, parser) -> None:
        parser.add_argument('--margins', help=texts.HELP_MARGINS)
        parser.add_argument('--costs', help=texts.HELP_COSTS)
        parser.add_argument('--beta', type=float, help=texts.HELP_BETA)
        parser.add_argument('--tol', type=float, help=texts.HELP_TOL)
        parser.add_argument('--max-iter', type=int, help=texts.HELP_MAX_ITER)
        parser.add_argument(
            '--scale', choices=[s.value for s in Scale], help=texts.HELP_SCALE
        )
        parser.add_argument('--sweep', help=texts.HELP_SWEEP_BETA)

    def run(self, config, writer) -> bool:
        inst = load_instance(config['margins'], config['costs'], config)
        solution = solve_sinkhorn(
            inst, tol=config['tol'], max_iter=config['max_iter']
        )
        report = primal_dual_report(solution, inst)
        d_star = solution.d_star
        if config['scale'] == Scale.COUNTS.value:
            d_star = d_star.to_counts(inst.N)

        writer.table('d_star.csv', pd.DataFrame(d_star.d), header=False)
        writer.table('potentials.csv', potentials_frame(solution.potentials))
        for key, value in (
            ('n', inst.n),
            ('N', inst.N),
            ('beta', inst.beta),
            ('scale', config['scale']),
            ('iterations', solution.iterations),
            ('converged', solution.converged),
            ('max_violation', solution.max_violation),
            ('primal', report.primal),
            ('dual', report.dual),
            ('dual_gap', report.dual_gap),
            ('mean_trip_time', mean_trip_time(solution.d_star, inst.T)),
            ('entropy', entropy(solution.d_star)),
        ):
            writer.report(key, value)

        if config.get('sweep'):
            rows = beta_sweep(inst, sorted(config['sweep']), tol=config['tol'])
            writer.table('beta_sweep.csv', pd.DataFrame(
                [row.__dict__ for row in rows]
            ))
            times = np.array([row.mean_trip_time for row in rows])
            writer.report('sweep_points', len(rows))
            writer.report(
                'sweep_time_nonincreasing',
                bool(np.all(np.diff(times) <= 1e-12)),
            )
        return True
