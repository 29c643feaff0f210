import numpy as np
import pandas as pd
from core import texts
from core.services import read_matrix
from correspondence.loaders import load_instance
from correspondence.solver import solve_sinkhorn
from runs.mixins import RunCommand
from runs.serializers import SurveySerializer
from survey.estimator import (SurveyCounts, mle_fit_gravity,
                              required_sample_size, sample_survey,
                              survey_bound, survey_coverage)

BETA_NOTE = (
    'beta считается известным; для оценки beta повторите fit на сетке '
    'beta и выберите значение с наибольшим правдоподобием.'
)


def _distance(first: np.ndarray, second: np.ndarray) -> float:
    return float(np.linalg.norm(first - second))


class Command(RunCommand):
    help = 'Опрос жителей: объём выборки и оценка гравитационной модели.'
    serializer_class = SurveySerializer

    def add_run_arguments(self, parser) -> None:
        parser.add_argument(
            '--mode', choices=['size', 'fit', 'generate'], help=texts.HELP_MODE
        )
        parser.add_argument('--epsilon', type=float, help=texts.HELP_EPSILON)
        parser.add_argument('--sigma', type=float, help=texts.HELP_SIGMA)
        parser.add_argument('--counts', help=texts.HELP_COUNTS)
        parser.add_argument('--margins', help=texts.HELP_MARGINS)
        parser.add_argument('--costs', help=texts.HELP_COSTS)
        parser.add_argument('--beta', type=float, help=texts.HELP_BETA)
        parser.add_argument('--n-resp', type=int, help=texts.HELP_N_RESP)
        parser.add_argument('--seed', type=int, help=texts.HELP_SEED)
        parser.add_argument(
            '--replications', type=int, help=texts.HELP_REPLICATIONS
        )
        parser.add_argument('--tol', type=float, help=texts.HELP_TOL)

    def run(self, config, writer) -> bool:
        mode = config['mode']
        if mode == 'size':
            size = required_sample_size(config['epsilon'], config['sigma'])
            writer.report('bound', survey_bound(
                config['epsilon'], config['sigma']
            ))
            writer.report('required_sample_size', size)
            self.stdout.write(str(size))
            return True

        if mode == 'fit':
            counts = SurveyCounts(read_matrix(config['counts']))
            T = read_matrix(config['costs'])
            truth = None
        else:
            inst = load_instance(config['margins'], config['costs'], config)
            T = inst.T
            truth = solve_sinkhorn(inst).d_star
            counts = sample_survey(truth, config['n_resp'], config['seed'])
            writer.table('counts.csv', pd.DataFrame(counts.r), header=False)
            writer.table('truth.csv', pd.DataFrame(truth.d), header=False)
            writer.meta['rng_id'] = counts.rng_id

        fit = mle_fit_gravity(counts, T, config['beta'], config['tol'])
        empirical = counts.empirical().d
        writer.table('empirical.csv', pd.DataFrame(empirical), header=False)
        writer.table('mle.csv', pd.DataFrame(fit.d_star.d), header=False)
        writer.report('N_resp', counts.n_resp)
        writer.report('iterations', fit.iterations)
        writer.report('converged', fit.converged)
        writer.report(
            'empirical_to_mle', _distance(empirical, fit.d_star.d)
        )
        writer.report('note', BETA_NOTE)
        if truth is None:
            return True

        writer.report('mle_to_truth', _distance(fit.d_star.d, truth.d))
        writer.report('empirical_to_truth', _distance(empirical, truth.d))
        if not config.get('replications'):
            return True
        coverage = survey_coverage(
            truth, config['epsilon'], config['sigma'],
            config['replications'], config['seed'],
        )
        writer.report('coverage_n_resp', coverage.n_resp)
        writer.report('coverage_frequency', coverage.frequency)
        writer.report('coverage', 'PASS' if coverage.passed else 'FAIL')
        return coverage.passed
