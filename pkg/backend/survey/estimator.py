"""Опрос жителей: объём выборки, моделирование опроса и оценка
гравитационной модели методом максимального правдоподобия.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import ceil, log

import numpy as np
from core.enums import ErrorCodes, RngIds
from core.validators import (RangeValidator, nonnegative_entries_validator,
                             positive_validator, probability_vector_validator,
                             sigma_validator)
from correspondence.models import Correspondence, OdInstance
from correspondence.solver import ElpSolution, solve_sinkhorn
from django.core.exceptions import ValidationError
from kinetics.statistics import distances

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SurveyCounts:
    """Результаты опроса.

    Attributes:
        r (np.ndarray): Число респондентов r[i, j], живущих в i
            и работающих в j.
        seed (int | None): Зерно, если опрос смоделирован.
        rng_id (str | None): Алгоритм генератора.
    """
    r: np.ndarray
    seed: int | None = None
    rng_id: str | None = None

    def __post_init__(self) -> None:
        r = np.asarray(self.r)
        nonnegative_entries_validator(r, 'r')
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise ValidationError(
                f'Ожидается квадратная матрица ответов, получено {r.shape}.',
                code=ErrorCodes.DIMENSION_MISMATCH.value,
            )
        if not np.all(r == np.round(r)):
            raise ValidationError(
                'Число респондентов должно быть целым.',
                code=ErrorCodes.PARSE_ERROR.value,
            )
        object.__setattr__(self, 'r', r.astype(np.int64))

    @property
    def n_resp(self) -> int:
        return int(self.r.sum())

    def empirical(self) -> Correspondence:
        """Выборочная оценка r / N_resp."""
        return Correspondence(self.r / max(self.n_resp, 1))


def survey_bound(epsilon: float, sigma: float) -> float:
    """(4 + 8 ln(1 / sigma)) / epsilon^2 без округления."""
    positive_validator(epsilon)
    sigma_validator(sigma)
    return (4 + 8 * log(1 / sigma)) / epsilon ** 2


def required_sample_size(epsilon: float, sigma: float) -> int:
    """Число респондентов, при котором ||r / N - d*||_2 < epsilon с
    вероятностью не меньше 1 - sigma.

    Raises:
        ValidationError: epsilon <= 0 или sigma вне (0, 0.5) (INVALID_RANGE).
    """
    return int(ceil(survey_bound(epsilon, sigma)))


def sample_survey(
    d_star: Correspondence,
    n_resp: int,
    seed: int,
) -> SurveyCounts:
    """Моделирует идеальный опрос: n_resp независимых ответов.

    Клетка выбирается обратной функцией распределения по развёрнутой
    по строкам матрице d*.
    """
    RangeValidator(low=0, low_inclusive=True, field='N_resp')(n_resp)
    shares = d_star.to_shares(d_star.d.sum()).d
    probability_vector_validator(shares, 'd_star')
    cumulative = np.cumsum(shares.reshape(-1))
    rng = np.random.default_rng(seed)
    cells = np.searchsorted(
        cumulative, rng.random(int(n_resp)) * cumulative[-1], side='right'
    )
    cells = np.minimum(cells, cumulative.size - 1)
    counts = np.bincount(cells, minlength=cumulative.size)
    return SurveyCounts(
        counts.reshape(shares.shape),
        seed=seed,
        rng_id=RngIds.PCG64_INVERSE_CDF.value,
    )


def mle_fit_gravity(
    counts: SurveyCounts,
    T: np.ndarray,
    beta: float,
    tol: float | None = None,
) -> ElpSolution:
    """Оценка гравитационной модели по результатам опроса.

    Маргиналы берутся из сумм ответов по строкам и столбцам, затем
    решается та же задача ЭЛП, что и для известных маргиналов.

    Raises:
        ValidationError: В районе нет ни одного респондента (ZERO_MARGIN).
    """
    rows, cols = counts.r.sum(axis=1), counts.r.sum(axis=0)
    empty = np.flatnonzero((rows == 0) | (cols == 0))
    if empty.size:
        raise ValidationError(
            'Нет респондентов в районах '
            f'{", ".join(str(index + 1) for index in empty)}.',
            code=ErrorCodes.ZERO_MARGIN.value,
        )
    inst = OdInstance(L=rows, W=cols, T=T, beta=beta)
    if tol is None:
        return solve_sinkhorn(inst)
    return solve_sinkhorn(inst, tol=tol)


@dataclass(frozen=True)
class CoverageReport:
    """Частота отклонений выборочной оценки не меньше epsilon.

    Attributes:
        n_resp (int): Объём каждой выборки.
        replications (int): Число повторов.
        exceedances (int): Повторы с ||r / N - d*||_2 >= epsilon.
        frequency (float): Их доля.
        passed (bool): frequency <= sigma.
    """
    n_resp: int
    replications: int
    exceedances: int
    frequency: float
    passed: bool


def survey_coverage(
    d_star: Correspondence,
    epsilon: float,
    sigma: float,
    replications: int,
    seed: int,
    workers: int = 1,
) -> CoverageReport:
    """Проверяет гарантию объёма выборки повторными опросами.

    Повтор r использует зерно seed + r.
    """
    n_resp = required_sample_size(epsilon, sigma)
    target = d_star.to_shares(d_star.d.sum())
    with ThreadPoolExecutor(max_workers=max(workers, 1)) as executor:
        samples = list(executor.map(
            lambda replica: sample_survey(target, n_resp, seed + replica).r,
            range(replications),
        ))
    gaps = distances(samples, target, n_resp)
    exceedances = int((gaps >= epsilon).sum())
    logger.info(
        'Опрос N = %s: %s из %s повторов с отклонением >= %s.',
        n_resp, exceedances, replications, epsilon,
    )
    return CoverageReport(
        n_resp=n_resp,
        replications=replications,
        exceedances=exceedances,
        frequency=exceedances / replications,
        passed=exceedances / replications <= sigma,
    )
