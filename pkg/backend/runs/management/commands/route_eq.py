import pandas as pd
from core import texts
from core.enums import StepRule, Tolerances
from kinetics.statistics import (concentration_radius, concentration_test,
                                 trajectory_frame)
from routes.dynamics import simulate_logit_dynamics
from routes.equilibrium import (complementarity_residual, corollary_sweep,
                                path_costs, select_entropy_pathflow,
                                solve_sue, solve_wardrop)
from routes.loaders import edge_frame, load_network, path_frame
from routes.paths import enumerate_paths
from runs.mixins import RunCommand
from runs.serializers import RouteEqSerializer


class Command(RunCommand):
    help = 'Равновесие игры выбора маршрута: SUE или Вардроп.'
    serializer_class = RouteEqSerializer

    def add_run_arguments(self, parser) -> None:
        parser.add_argument('--network', help=texts.HELP_NETWORK)
        parser.add_argument('--omega', type=float, help=texts.HELP_OMEGA)
        parser.add_argument('--tol', type=float, help=texts.HELP_TOL)
        parser.add_argument('--max-iter', type=int, help=texts.HELP_MAX_ITER)
        parser.add_argument(
            '--step-rule', choices=[rule.value for rule in StepRule],
            help=texts.HELP_STEP_RULE,
        )
        parser.add_argument(
            '--max-paths', type=int, help=texts.HELP_MAX_PATHS
        )
        parser.add_argument('--sweep', help=texts.HELP_SWEEP_OMEGA)
        parser.add_argument(
            '--population', type=int, help=texts.HELP_POPULATION
        )
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

    def run(self, config, writer) -> bool:
        net = load_network(config['network'])
        ps = enumerate_paths(net, config['max_paths'])
        omega, tol = config['omega'], config['tol']
        passed = True

        if omega > 0:
            solution = solve_sue(
                ps, net, omega, tol=tol, max_iter=config['max_iter'],
                step_rule=config['step_rule'],
            )
            x, y = solution.flow.x, solution.y
            writer.report('objective', solution.objective)
            writer.report('fixed_point_residual', solution.residual)
            writer.report('iterations', solution.iterations)
            writer.report('converged', solution.converged)
        else:
            wardrop = solve_wardrop(
                ps, net, tol=tol, max_iter=config['max_iter']
            )
            x = select_entropy_pathflow(
                ps, wardrop.y, tol=max(tol, Tolerances.FEASIBILITY.value)
            ).x
            y = wardrop.y
            writer.report('objective', wardrop.objective)
            writer.report('iterations', wardrop.iterations)
            writer.report('converged', wardrop.converged)

        costs = path_costs(ps, net, x)
        writer.table('paths.csv', path_frame(ps, net, x, costs))
        writer.table('edges.csv', edge_frame(net, y))
        writer.report('paths', ps.m)
        writer.report('truncated', ps.truncated)
        writer.report('omega', omega)
        writer.report(
            'complementarity_residual', complementarity_residual(ps, net, x)
        )

        if config.get('sweep'):
            sweep = corollary_sweep(ps, net, config['sweep'], tol=tol)
            writer.table('sweep.csv', pd.DataFrame({
                'omega': sweep.omegas,
                'distance': sweep.distances,
            }))
            writer.report('sweep_monotone', sweep.monotone)
            writer.report('sweep_final_distance', sweep.final)
            writer.report('sweep', 'PASS' if sweep.passed else 'FAIL')
            passed &= sweep.passed

        if config.get('population'):
            N = config['population']
            traj = simulate_logit_dynamics(
                ps, net, N, config['lam'], omega, config['events'],
                config['sample_every'], config['seed'],
            )
            report = concentration_test(
                traj, x, config['sigma'], config.get('burn_in')
            )
            writer.table(
                'trajectory.csv',
                trajectory_frame(traj, x, include_state=True, prefix='x'),
            )
            writer.meta['rng_id'] = traj.rng_id
            average_radius = concentration_radius(0.25, N)
            writer.report('population', N)
            writer.report('radius', report.radius)
            writer.report('exceedances', report.exceedances)
            writer.report('allowed_exceedances', report.allowed)
            writer.report('mean_distance', report.mean_distance)
            writer.report(
                'mean_within_radius_0.25',
                report.mean_distance <= average_radius,
            )
            writer.report(
                'concentration', 'PASS' if report.passed else 'FAIL'
            )
            passed &= report.passed
        return passed
