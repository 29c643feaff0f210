"""Статистика траекторий: концентрация и время перемешивания.

Функции работают с любой траекторией `KineticsTrajectory`: матрицы d
обменов и векторы x логит динамики сравниваются с целевым распределением
в долях по евклидовой норме.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import ceil, log, sqrt

import numpy as np
import pandas as pd
from core.enums import Defaults, ErrorCodes, Limits
from core.validators import RangeValidator, sigma_validator
from correspondence.models import Correspondence, OdInstance
from correspondence.solver import solve_sinkhorn
from django.core.exceptions import ValidationError
from kinetics.models import KineticsState, KineticsTrajectory
from kinetics.simulator import ExchangeProcess, check_state
from scipy.optimize import linprog
from scipy.stats import binom

logger = logging.getLogger(__name__)


def concentration_radius(sigma: float, N: float) -> float:
    """Радиус rho(sigma, N) = (2 sqrt 2 + 4 sqrt(ln 1/sigma)) / sqrt N."""
    sigma_validator(sigma)
    RangeValidator(low=0, field='N')(N)
    return (2 * sqrt(2) + 4 * sqrt(log(1 / sigma))) / sqrt(N)


def default_burn_in(N: int) -> int:
    """Прогрев по умолчанию: 5 N ln N событий."""
    return int(ceil(Defaults.BURN_IN_FACTOR.value * N * log(max(N, 2))))


def _target_shares(
    target: Correspondence | np.ndarray, N: float
) -> np.ndarray:
    if isinstance(target, Correspondence):
        return target.to_shares(N).d.reshape(-1)
    return np.asarray(target, dtype=float).reshape(-1)


def distances(
    states: list[np.ndarray],
    target: Correspondence | np.ndarray,
    N: float,
) -> np.ndarray:
    """Расстояния ||state / N - target||_2 для каждого снимка."""
    if not states:
        return np.zeros(0)
    flat = np.array([np.ravel(state) for state in states], dtype=float) / N
    return np.linalg.norm(flat - _target_shares(target, N), axis=1)


@dataclass(frozen=True)
class ConcentrationReport:
    """Итог проверки концентрации.

    Attributes:
        sigma (float): Допустимая доля выбросов.
        radius (float): Радиус rho(sigma, N).
        samples (int): Число снимков после прогрева.
        exceedances (int): Число снимков на расстоянии >= radius.
        frequency (float): Доля таких снимков.
        allowed (int): Наибольшее допустимое число выбросов с учётом
            одностороннего биномиального запаса.
        mean_distance (float): Среднее расстояние.
        max_distance (float): Наибольшее расстояние.
        passed (bool): Проверка пройдена.
    """
    sigma: float
    radius: float
    samples: int
    exceedances: int
    frequency: float
    allowed: int
    mean_distance: float
    max_distance: float
    passed: bool


def concentration_test(
    traj: KineticsTrajectory,
    target: Correspondence | np.ndarray,
    sigma: float,
    burn_in: int | None = None,
) -> ConcentrationReport:
    """Проверяет, что траектория сосредоточена вокруг target.

    Args:
        traj (KineticsTrajectory): Траектория процесса.
        target (Correspondence | np.ndarray): Равновесие d* или x*.
        sigma (float): Уровень 0 < sigma < 0.5.
        burn_in (int | None): Прогрев в событиях, по умолчанию 5 N ln N.

    Raises:
        ValidationError:
            INVALID_RANGE - sigma вне (0, 0.5);
            INSUFFICIENT_SAMPLES - после прогрева меньше 100 снимков.

    Returns:
        ConcentrationReport: Частота выбросов и вердикт.
    """
    N = traj.population
    radius = concentration_radius(sigma, N)
    if burn_in is None:
        burn_in = default_burn_in(N)
    states = traj.states(burn_in)
    if len(states) < Limits.MIN_SAMPLES.value:
        raise ValidationError(
            f'После прогрева {burn_in} событий осталось {len(states)} '
            f'снимков, нужно не меньше {Limits.MIN_SAMPLES.value}.',
            code=ErrorCodes.INSUFFICIENT_SAMPLES.value,
        )
    gaps = distances(states, target, N)
    exceedances = int((gaps >= radius).sum())
    allowed = int(binom.ppf(Defaults.BINOMIAL_CONFIDENCE.value, len(gaps),
                            sigma))
    report = ConcentrationReport(
        sigma=sigma,
        radius=radius,
        samples=len(gaps),
        exceedances=exceedances,
        frequency=exceedances / len(gaps),
        allowed=allowed,
        mean_distance=float(gaps.mean()),
        max_distance=float(gaps.max()),
        passed=exceedances <= allowed,
    )
    logger.info(
        'Концентрация: %s из %s снимков дальше %.4g (допустимо %s).',
        exceedances, len(gaps), radius, allowed,
    )
    return report


def trajectory_frame(
    traj: KineticsTrajectory,
    target: Correspondence | np.ndarray,
    include_state: bool = False,
    prefix: str = 'd',
) -> pd.DataFrame:
    """Таблица `event_index,t,dist_to_dstar[,d_flat...]`."""
    states = [snap.state for snap in traj.samples]
    frame = pd.DataFrame({
        'event_index': [snap.event_index for snap in traj.samples],
        't': [snap.t for snap in traj.samples],
        'dist_to_dstar': distances(states, target, traj.population),
    })
    if include_state and states:
        flat = np.array([np.ravel(state) for state in states])
        for column in range(flat.shape[1]):
            frame[f'{prefix}_{column + 1}'] = flat[:, column]
    return frame


def largest_remainder(shares: np.ndarray, N: int) -> np.ndarray:
    """Целые числа с суммой N, ближайшие к shares * N."""
    raw = np.asarray(shares, dtype=float) * N
    counts = np.floor(raw).astype(np.int64)
    order = np.argsort(-(raw - counts), kind='stable')
    counts[order[:N - int(counts.sum())]] += 1
    return counts


def scaled_instance(inst: OdInstance, N: int) -> OdInstance:
    """Задача той же структуры с численностью N."""
    l, w = inst.shares()
    return OdInstance(
        largest_remainder(l, N), largest_remainder(w, N), inst.T, inst.beta
    )


def northwest_corner(rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Вершина транспортного многогранника по правилу северо-западного угла.
    """
    rows, cols = rows.astype(np.int64).copy(), cols.astype(np.int64).copy()
    d = np.zeros((len(rows), len(cols)), dtype=np.int64)
    i = j = 0
    while i < len(rows) and j < len(cols):
        amount = min(rows[i], cols[j])
        d[i, j] = amount
        rows[i] -= amount
        cols[j] -= amount
        if rows[i] == 0:
            i += 1
        else:
            j += 1
    return d


def corner_state(inst: OdInstance, d_star: Correspondence) -> np.ndarray:
    """Вершина A с наименьшим скалярным произведением на d*.

    Транспортный многогранник с целыми маргиналами имеет целые вершины,
    поэтому симплекс-метод сразу даёт допустимое состояние.

    Raises:
        ValidationError: Вершина не найдена (OUT_OF_POLYTOPE).
    """
    n = inst.n
    result = linprog(
        d_star.to_shares(inst.N).d.reshape(-1),
        A_eq=np.vstack([
            np.kron(np.eye(n), np.ones(n)),
            np.kron(np.ones(n), np.eye(n)),
        ]),
        b_eq=np.concatenate([inst.L, inst.W]).astype(float),
        bounds=(0, None),
        method='highs-ds',
    )
    if result.status != 0:
        raise ValidationError(
            f'Не удалось построить вершину A: {result.message}',
            code=ErrorCodes.OUT_OF_POLYTOPE.value,
        )
    vertex = np.rint(result.x).astype(np.int64).reshape(n, n)
    check_state(vertex, inst)
    return vertex


def rounded_state(inst: OdInstance, d_star: Correspondence) -> np.ndarray:
    """Целая точка A рядом с N d*: округление вниз и добор остатков."""
    counts = np.floor(d_star.to_counts(inst.N).d).astype(np.int64)
    counts = np.maximum(counts, 0)
    row_deficit = np.maximum(inst.L - counts.sum(axis=1), 0)
    col_deficit = np.maximum(inst.W - counts.sum(axis=0), 0)
    return counts + northwest_corner(row_deficit, col_deficit)


def half_time(
    inst: OdInstance,
    d0: np.ndarray,
    d_star: Correspondence,
    threshold: float,
    horizon_events: int,
    seed: int,
    lam: float = Defaults.INTENSITY.value,
) -> int:
    """Номер первого события, после которого расстояние до d* < threshold.

    Raises:
        ValidationError: Порог не достигнут за horizon_events (NO_CROSSING).
    """
    N = inst.N
    diff = (np.asarray(d0, dtype=float) / N - d_star.to_shares(N).d)
    diff = diff.reshape(-1).tolist()
    squared = sum(value * value for value in diff)
    limit = threshold * threshold
    if squared < limit:
        return 0
    process = ExchangeProcess(inst, KineticsState(d0), lam, seed)
    unit = 1.0 / N
    for event in range(1, horizon_events + 1):
        index, _ = process.step()
        for cell, sign in (
            (process.lose_a[index], -unit),
            (process.lose_b[index], -unit),
            (process.gain_a[index], unit),
            (process.gain_b[index], unit),
        ):
            old = diff[cell]
            diff[cell] = old + sign
            squared += diff[cell] * diff[cell] - old * old
        if squared < limit:
            return event
    raise ValidationError(
        f'За {horizon_events} событий расстояние не опустилось ниже '
        f'{threshold:.4g} (N = {N}, зерно {seed}).',
        code=ErrorCodes.NO_CROSSING.value,
    )


@dataclass(frozen=True)
class MixingRow:
    N: int
    t_half: float
    t_half_std: float
    replicas: int
    start_distance: float
    threshold: float


@dataclass(frozen=True)
class MixingReport:
    """Оценка зависимости времени перемешивания от N ln N.

    Attributes:
        rows (list[MixingRow]): Средние t_half по сетке N.
        slope (float): Наклон прямой log t_half ~ log(N ln N),
            nan при вырожденной подгонке.
        intercept (float): Свободный член той же прямой.
        degenerate (bool): Хотя бы одно t_half = 0.
        passed (bool): Наклон в допустимых пределах.
    """
    rows: list[MixingRow]
    slope: float
    intercept: float
    degenerate: bool
    passed: bool

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([row.__dict__ for row in self.rows])


def _check_grid(n_grid: list[int], seeds: int) -> None:
    if (
        len(n_grid) < Limits.MIN_MIXING_GRID.value
        or max(n_grid) < 10 * min(n_grid)
    ):
        raise ValidationError(
            f'Сетка N должна содержать не меньше '
            f'{Limits.MIN_MIXING_GRID.value} значений и охватывать '
            f'хотя бы порядок, получено {n_grid}.',
            code=ErrorCodes.INVALID_RANGE.value,
        )
    if seeds < Limits.MIN_MIXING_SEEDS.value:
        raise ValidationError(
            f'Нужно не меньше {Limits.MIN_MIXING_SEEDS.value} зёрен, '
            f'получено {seeds}.',
            code=ErrorCodes.INVALID_RANGE.value,
        )


def mixing_scaling(
    inst: OdInstance,
    n_grid: list[int],
    seeds: int = Limits.MIN_MIXING_SEEDS.value,
    seed: int = 0,
    lam: float = Defaults.INTENSITY.value,
    start: str = 'corner',
    horizon_events: int | None = None,
    workers: int = 1,
) -> MixingReport:
    """Оценивает рост времени перемешивания с численностью N.

    Для каждого N маргиналы масштабируются с сохранением долей, процесс
    запускается из вершины A (start='corner') или из округлённого d*
    (start='dstar') и останавливается, когда расстояние до d* становится
    меньше 2 rho(0.25, N). Средние по зёрнам seed, seed + 1, ...
    аппроксимируются прямой в координатах log(N ln N), log t_half.

    Args:
        inst (OdInstance): Задача, задающая доли маргиналов, T и beta.
        n_grid (list[int]): Значения N.
        seeds (int): Число повторов для каждого N.
        seed (int): Первое зерно.
        lam (float): Интенсивность обменов.
        start (str): 'corner' или 'dstar'.
        horizon_events (int | None): Предел числа событий,
            по умолчанию 20 N ln N.
        workers (int): Число потоков для повторов.

    Raises:
        ValidationError: INVALID_RANGE или NO_CROSSING.

    Returns:
        MixingReport: Таблица t_half и подобранный наклон.
    """
    n_grid = sorted(int(value) for value in n_grid)
    _check_grid(n_grid, seeds)
    rows = []
    for N in n_grid:
        scaled = scaled_instance(inst, N)
        d_star = solve_sinkhorn(scaled).d_star
        if start == 'dstar':
            d0 = rounded_state(scaled, d_star)
        else:
            d0 = corner_state(scaled, d_star)
        threshold = (
            Defaults.MIXING_RADIUS_FACTOR.value
            * concentration_radius(Defaults.MIXING_SIGMA.value, N)
        )
        start_distance = float(
            np.linalg.norm(d0 / N - d_star.to_shares(N).d)
        )
        if 0 < start_distance < 2 * threshold:
            logger.warning(
                'N = %s: старт на расстоянии %.3f при пороге %.3f, '
                't_half ещё не выходит на рост N ln N.',
                N, start_distance, threshold,
            )
        horizon = horizon_events or int(ceil(20 * N * log(N)))
        with ThreadPoolExecutor(max_workers=max(workers, 1)) as executor:
            times = list(executor.map(
                lambda replica: half_time(
                    scaled, d0, d_star, threshold, horizon,
                    seed + replica, lam,
                ),
                range(seeds),
            ))
        rows.append(MixingRow(
            N=N,
            t_half=float(np.mean(times)),
            t_half_std=float(np.std(times)),
            replicas=seeds,
            start_distance=start_distance,
            threshold=threshold,
        ))
        logger.info('N = %s: t_half = %.1f событий.', N, rows[-1].t_half)

    degenerate = any(row.t_half == 0 for row in rows)
    if degenerate:
        logger.warning('Нулевое t_half: подгонка наклона не выполняется.')
        return MixingReport(rows, float('nan'), float('nan'), True, False)
    x = np.log([row.N * log(row.N) for row in rows])
    y = np.log([row.t_half for row in rows])
    slope, intercept = np.polyfit(x, y, 1)
    return MixingReport(
        rows=rows,
        slope=float(slope),
        intercept=float(intercept),
        degenerate=False,
        passed=bool(
            Defaults.MIXING_SLOPE_LOW.value
            <= slope
            <= Defaults.MIXING_SLOPE_HIGH.value
        ),
    )
