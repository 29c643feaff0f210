"""Решение задачи энтропийно-линейного программирования.

Равновесная матрица корреспонденций ищется через двойственные потенциалы:
попеременное выполнение уравнений для строк и столбцов (балансировка
Синхорна) в логарифмической шкале. Все вычисления ведутся в долях,
перевод в абсолютные значения - умножением на N на границе.
"""
import logging
from dataclasses import dataclass

import numpy as np
from core.enums import ErrorCodes, Limits, Scale, Tolerances
from core.validators import positive_validator
from correspondence.models import (Correspondence, DualPotentials,
                                   OdInstance)
from django.core.exceptions import ValidationError
from scipy.special import logsumexp, xlogy

logger = logging.getLogger(__name__)

LOG_MAX_FLOAT = np.log(np.finfo(float).max)


@dataclass(frozen=True, eq=False)
class ElpSolution:
    """Решение задачи ЭЛП.

    Attributes:
        d_star (Correspondence): Равновесная матрица в долях.
        potentials (DualPotentials): Потенциалы в канонической калибровке.
        primal_value (float): sum d ln d + beta sum d T.
        dual_gap (float): Разность прямого и двойственного значений.
        iterations (int): Число выполненных итераций.
        converged (bool): Достигнута ли требуемая точность.
        max_violation (float): Наибольшее нарушение маргиналов.
    """
    d_star: Correspondence
    potentials: DualPotentials
    primal_value: float
    dual_gap: float
    iterations: int
    converged: bool
    max_violation: float


@dataclass(frozen=True)
class PrimalDualReport:
    entropy_term: float
    cost_term: float
    primal: float
    lagrangian: float
    dual: float
    dual_gap: float


@dataclass(frozen=True)
class BalanceResult:
    lam_l: np.ndarray
    lam_w: np.ndarray
    iterations: int
    violation: float
    converged: bool


@dataclass(frozen=True)
class SweepRow:
    beta: float
    mean_trip_time: float
    entropy: float
    iterations: int
    converged: bool


def _margin_violation(d: np.ndarray, l: np.ndarray, w: np.ndarray) -> float:
    return max(
        float(np.abs(d.sum(axis=1) - l).max()),
        float(np.abs(d.sum(axis=0) - w).max()),
    )


def balance(
    log_kernel: np.ndarray,
    l: np.ndarray,
    w: np.ndarray,
    tol: float,
    max_iter: int,
) -> BalanceResult:
    """Балансировка положительной матрицы под маргиналы l, w.

    Ищет потенциалы, при которых матрица
    exp(-lam_l[i] + lam_w[j] + log_kernel[i, j]) имеет суммы строк l и
    суммы столбцов w. За один проход сначала пересчитываются lam_l
    (суммы строк), затем lam_w (суммы столбцов).

    Args:
        log_kernel (np.ndarray):
            Логарифм ядра, допускаются значения `-inf` (нулевые клетки).
        l (np.ndarray): Целевые суммы строк.
        w (np.ndarray): Целевые суммы столбцов.
        tol (float): Допуск на нарушение маргиналов.
        max_iter (int): Предельное число проходов.

    Returns:
        BalanceResult:
            Лучшие найденные потенциалы (с наименьшим нарушением).
    """
    log_l, log_w = np.log(l), np.log(w)
    lam_l = np.zeros_like(l)
    lam_w = np.zeros_like(w)
    best = BalanceResult(lam_l, lam_w, 0, np.inf, False)

    for iteration in range(1, max_iter + 1):
        lam_l = logsumexp(lam_w[None, :] + log_kernel, axis=1) - log_l
        lam_w = log_w - logsumexp(log_kernel - lam_l[:, None], axis=0)
        violation = _margin_violation(
            np.exp(log_kernel - lam_l[:, None] + lam_w[None, :]), l, w
        )
        if violation < best.violation:
            best = BalanceResult(lam_l, lam_w, iteration, violation, False)
        if violation <= tol:
            return BalanceResult(lam_l, lam_w, iteration, violation, True)

    logger.warning(
        'MAX_ITER_EXCEEDED: за %s итераций нарушение маргиналов %.3e > %.1e.',
        max_iter, best.violation, tol,
    )
    return BalanceResult(
        best.lam_l, best.lam_w, max_iter, best.violation, False
    )


def _check_margins(l: np.ndarray, w: np.ndarray) -> None:
    if l.min() <= 0 or w.min() <= 0:
        raise ValidationError(
            'Нулевой маргинал: потенциал такого района не определён.',
            code=ErrorCodes.DEGENERATE_MARGIN.value,
        )


def solve_sinkhorn(
    inst: OdInstance,
    tol: float = Tolerances.SINKHORN.value,
    max_iter: int = Limits.SINKHORN_MAX_ITER.value,
    gap_tol: float = Tolerances.DUAL_GAP.value,
) -> ElpSolution:
    """Решает задачу ЭЛП через систему уравнений на потенциалы.

    Возвращаемая матрица имеет вид
    d[i, j] = exp(-lam_l[i]) * exp(lam_w[j]) * exp(-beta * T[i, j])
    по построению; потенциалы приведены к калибровке lam_l[0] = 0.

    Args:
        inst (OdInstance): Постановка задачи.
        tol (float): Допуск на нарушение маргиналов в долях.
        max_iter (int): Предельное число итераций.
        gap_tol (float): Допуск двойственного зазора.

    Raises:
        ValidationError: DEGENERATE_MARGIN - нулевой l[i] или w[j].

    Returns:
        ElpSolution:
            Решение. При исчерпании итераций - лучшее приближение
            с `converged=False`.
    """
    positive_validator(tol)
    l, w = inst.shares()
    _check_margins(l, w)

    result = balance(-inst.beta * inst.T, l, w, tol, max_iter)
    potentials = DualPotentials(result.lam_l, result.lam_w).canonical()
    d_star = gravity_eval(potentials, inst)
    violation = _margin_violation(d_star.d, l, w)
    report = _primal_dual(d_star.d, potentials, inst)
    converged = bool(
        result.converged and violation <= tol and report.dual_gap <= gap_tol
    )
    logger.debug(
        'Синхорн: %s итераций, нарушение %.3e, зазор %.3e.',
        result.iterations, violation, report.dual_gap,
    )
    return ElpSolution(
        d_star=d_star,
        potentials=potentials,
        primal_value=report.primal,
        dual_gap=report.dual_gap,
        iterations=result.iterations,
        converged=converged,
        max_violation=violation,
    )


def gravity_eval(
    potentials: DualPotentials,
    inst: OdInstance,
) -> Correspondence:
    """Гравитационная матрица при заданных потенциалах.

    Проекция на многогранник A не выполняется, матрица в общем случае
    не нормирована.

    Raises:
        ValidationError: OVERFLOW - показатель вне представимого диапазона.
    """
    log_d = (
        -potentials.lam_l[:, None]
        + potentials.lam_w[None, :]
        - inst.beta * inst.T
    )
    if not np.all(np.isfinite(log_d)) or log_d.max() > LOG_MAX_FLOAT:
        raise ValidationError(
            'Показатель экспоненты вне представимого диапазона.',
            code=ErrorCodes.OVERFLOW.value,
        )
    return Correspondence(np.exp(log_d), Scale.SHARES)


def primal_value(d: np.ndarray, inst: OdInstance) -> float:
    """Значение sum d ln d + beta sum d T (0 ln 0 = 0)."""
    return float(xlogy(d, d).sum() + inst.beta * (d * inst.T).sum())


def dual_value(potentials: DualPotentials, inst: OdInstance) -> float:
    """Двойственная функция задачи на симплексе при заданных потенциалах.

    Минимум лагранжиана по d на симплексе sum d = 1 достигается на
    нормированной гравитационной матрице, поэтому значение выписывается
    явно; функция вогнута по потенциалам.
    """
    l, w = inst.shares()
    log_z = logsumexp(
        -potentials.lam_l[:, None] + potentials.lam_w[None, :]
        - inst.beta * inst.T
    )
    return float(
        -log_z - potentials.lam_l @ l + potentials.lam_w @ w
    )


def _primal_dual(
    d: np.ndarray,
    potentials: DualPotentials,
    inst: OdInstance,
) -> PrimalDualReport:
    l, w = inst.shares()
    entropy_term = float(xlogy(d, d).sum())
    cost_term = float(inst.beta * (d * inst.T).sum())
    primal = entropy_term + cost_term
    lagrangian = float(
        primal
        + potentials.lam_l @ (d.sum(axis=1) - l)
        + potentials.lam_w @ (w - d.sum(axis=0))
    )
    dual = dual_value(potentials, inst)
    return PrimalDualReport(
        entropy_term=entropy_term,
        cost_term=cost_term,
        primal=primal,
        lagrangian=lagrangian,
        dual=dual,
        dual_gap=primal - dual,
    )


def primal_dual_report(
    sol: ElpSolution,
    inst: OdInstance,
) -> PrimalDualReport:
    """Прямое значение, лагранжиан и двойственный зазор решения.

    Прямое значение приводится в форме минимизации:
    sum d ln d + beta sum d T (задача максимизации энтропии со знаком минус).
    """
    return _primal_dual(
        sol.d_star.to_shares(inst.N).d, sol.potentials, inst
    )


def mean_trip_time(d: Correspondence, T: np.ndarray) -> float:
    """Средние затраты sum d T в шкале матрицы d."""
    return float((d.d * np.asarray(T, dtype=float)).sum())


def solve_cloud(
    inst: OdInstance,
    potentials: DualPotentials,
) -> Correspondence:
    """Облачная модель: распределение при заданных внешних потенциалах.

    Потенциалы не оптимизируются, а трактуются как затраты на проживание
    и уровень заработной платы районов. Результат - softmax по всем парам:
    d[i, j] ~ exp(-beta (T[i, j] + lam_l[i] - lam_w[j])), sum d = 1.
    Маргиналы многогранника A в общем случае не выполняются.
    """
    log_d = -inst.beta * (
        inst.T + potentials.lam_l[:, None] - potentials.lam_w[None, :]
    )
    return Correspondence(np.exp(log_d - logsumexp(log_d)), Scale.SHARES)


def project_to_polytope(
    c: Correspondence,
    inst: OdInstance,
    tol: float = Tolerances.SINKHORN.value,
    max_iter: int = Limits.SINKHORN_MAX_ITER.value,
) -> Correspondence:
    """Проекция (по расстоянию Кульбака-Лейблера) на многогранник A.

    Положительная матрица масштабируется по строкам и столбцам под
    маргиналы задачи; нулевые клетки остаются нулевыми.
    Результат возвращается в той же шкале, что и исходная матрица.
    """
    l, w = inst.shares()
    _check_margins(l, w)
    shares = c.to_shares(inst.N).d
    with np.errstate(divide='ignore'):
        log_kernel = np.log(shares / shares.sum())
    result = balance(log_kernel, l, w, tol, max_iter)
    projected = Correspondence(
        np.exp(log_kernel - result.lam_l[:, None] + result.lam_w[None, :]),
        Scale.SHARES,
    )
    if c.scale is Scale.COUNTS:
        return projected.to_counts(inst.N)
    return projected


def entropy(d: Correspondence) -> float:
    """Энтропия F(d) = -sum d ln d."""
    return float(-xlogy(d.d, d.d).sum())


def beta_sweep(
    inst: OdInstance,
    betas: list[float],
    tol: float = Tolerances.SINKHORN.value,
) -> list[SweepRow]:
    """Решения на сетке beta для подбора параметра по средним затратам."""
    rows = []
    for beta in betas:
        solution = solve_sinkhorn(inst.with_beta(beta), tol=tol)
        rows.append(SweepRow(
            beta=float(beta),
            mean_trip_time=mean_trip_time(solution.d_star, inst.T),
            entropy=entropy(solution.d_star),
            iterations=solution.iterations,
            converged=solution.converged,
        ))
    return rows


def entropy_price_slopes(
    inst: OdInstance,
    betas: list[float],
    tol: float = Tolerances.SINKHORN.value,
) -> list[tuple[float, float]]:
    """Конечно-разностный наклон dF/dC между соседними точками сетки beta.

    Для равновесной матрицы производная энтропии F по средним затратам C
    равна beta (цена единицы затрат), поэтому наклон между соседними
    точками близок к beta в середине отрезка.

    Raises:
        ValidationError: Средние затраты не меняются на отрезке сетки
            (INVALID_RANGE), например при постоянной матрице T.

    Returns:
        list[tuple[float, float]]: Пары (середина отрезка, наклон).
    """
    rows = beta_sweep(inst, betas, tol)
    slopes = []
    for left, right in zip(rows, rows[1:]):
        delta = right.mean_trip_time - left.mean_trip_time
        if abs(delta) <= Tolerances.FEASIBILITY.value * max(
            1.0, abs(left.mean_trip_time)
        ):
            raise ValidationError(
                f'Средние затраты не меняются между beta = {left.beta:g} '
                f'и beta = {right.beta:g}, наклон не определён.',
                code=ErrorCodes.INVALID_RANGE.value,
            )
        slopes.append((
            (left.beta + right.beta) / 2,
            (right.entropy - left.entropy) / delta,
        ))
    return slopes
