"""Равновесия игры выбора маршрута.

Все потоки и затраты в долях: x лежит на симплексе S_m(1), y = theta x,
G_p(x) = sum_e theta[e, p] tau_e(y_e).

Стохастическое равновесие (SUE) минимизирует Psi(y(x)) + omega sum x ln x,
равновесие Вардропа - Psi(y(x)); из множества равновесий Вардропа по путям
выбирается распределение с наибольшей энтропией.
"""
import logging
from dataclasses import dataclass

import numpy as np
from core.enums import ErrorCodes, Limits, Scale, StepRule, Tolerances
from core.validators import positive_validator, probability_vector_validator
from django.core.exceptions import ValidationError
from routes.models import Network, PathSet, RouteFlow
from scipy.optimize import brentq, linprog
from scipy.special import logsumexp, softmax, xlogy

logger = logging.getLogger(__name__)

TINY = np.finfo(float).tiny


def _shares(x: RouteFlow | np.ndarray) -> np.ndarray:
    if isinstance(x, RouteFlow):
        return x.to_shares(float(x.x.sum())).x
    return np.asarray(x, dtype=float)


def path_costs(
    ps: PathSet,
    net: Network,
    x: RouteFlow | np.ndarray,
) -> np.ndarray:
    """Затраты G_p(x) всех путей."""
    return ps.theta.T @ net.latencies(ps.edge_flows(_shares(x)))


def beckmann_potential(
    ps: PathSet,
    net: Network,
    x: RouteFlow | np.ndarray,
) -> float:
    """Потенциал Psi(y(x)) = sum_e int_0^{y_e} tau_e(z) dz."""
    return float(net.potentials(ps.edge_flows(_shares(x))).sum())


def logit_choice(G: np.ndarray, omega: float) -> np.ndarray:
    """P_q = exp(-G_q / omega) / sum_p exp(-G_p / omega)."""
    positive_validator(omega)
    G = np.asarray(G, dtype=float)
    return softmax(-(G - G.min()) / omega)


def sue_objective(
    ps: PathSet,
    net: Network,
    x: RouteFlow | np.ndarray,
    omega: float,
) -> float:
    x = _shares(x)
    return beckmann_potential(ps, net, x) + omega * float(xlogy(x, x).sum())


def fixed_point_residual(
    ps: PathSet,
    net: Network,
    x: RouteFlow | np.ndarray,
    omega: float,
) -> float:
    """||x - logit_choice(G(x), omega)||_inf."""
    x = _shares(x)
    return float(np.abs(
        x - logit_choice(path_costs(ps, net, x), omega)
    ).max())


def complementarity_residual(
    ps: PathSet,
    net: Network,
    x: RouteFlow | np.ndarray,
) -> float:
    """sum_p x_p (G_p - min_q G_q): ноль только в равновесии Вардропа."""
    x = _shares(x)
    costs = path_costs(ps, net, x)
    return float(x @ (costs - costs.min()))


@dataclass(frozen=True, eq=False)
class SueSolution:
    """Стохастическое равновесие.

    Attributes:
        flow (RouteFlow): Потоки по путям x* в долях.
        y (np.ndarray): Потоки по рёбрам.
        costs (np.ndarray): Затраты путей G(x*).
        objective (float): Psi + omega sum x ln x.
        residual (float): Невязка неподвижной точки.
        iterations (int): Число итераций.
        converged (bool): Невязка не больше tol.
    """
    flow: RouteFlow
    y: np.ndarray
    costs: np.ndarray
    objective: float
    residual: float
    iterations: int
    converged: bool


@dataclass(frozen=True, eq=False)
class WardropSolution:
    """Равновесие Вардропа.

    Attributes:
        flow (RouteFlow): Одно из равновесных распределений по путям.
        y (np.ndarray): Потоки по рёбрам y* (единственны при строго
            возрастающих затратах).
        costs (np.ndarray): Затраты путей.
        gap (float): Невязка дополняющей нежёсткости.
        objective (float): Psi(y*).
        iterations (int): Число итераций.
        converged (bool): gap не больше tol.
    """
    flow: RouteFlow
    y: np.ndarray
    costs: np.ndarray
    gap: float
    objective: float
    iterations: int
    converged: bool


def _start(ps: PathSet, x0: np.ndarray | None) -> np.ndarray:
    if x0 is None:
        return np.full(ps.m, 1.0 / ps.m)
    x0 = np.asarray(x0, dtype=float)
    probability_vector_validator(x0, 'x0')
    return x0.copy()


def _slope(direction: np.ndarray, gradient: np.ndarray) -> float:
    """Производная вдоль направления с нулевой суммой.

    sum direction = 0 лишь с точностью до округления, поэтому градиент
    центрируется.
    """
    return float(direction @ (gradient - gradient.mean()))


def _line_search(derivative, upper: float) -> float:
    """Минимум выпуклой функции на [0, upper] по её производной."""
    if derivative(upper) <= 0:
        return upper
    if derivative(0.0) >= 0:
        return 0.0
    return brentq(
        derivative, 0.0, upper, xtol=1e-15, rtol=4 * np.finfo(float).eps,
    )


def solve_sue(
    ps: PathSet,
    net: Network,
    omega: float,
    tol: float = Tolerances.EQUILIBRIUM.value,
    max_iter: int = Limits.EQUILIBRIUM_MAX_ITER.value,
    step_rule: StepRule = StepRule.EXACT,
    x0: np.ndarray | None = None,
) -> SueSolution:
    """Стохастическое равновесие Нэша-Вардропа.

    Итерация x <- (1 - gamma) x + gamma logit_choice(G(x), omega). Шаг
    gamma выбирается точно по минимуму целевой функции на отрезке
    (StepRule.EXACT) или равен 2 / (k + 2) (StepRule.MSA). Итерации
    останавливаются, когда невязка неподвижной точки не больше tol.
    Если точность не достигнута, возвращается лучшая итерация, пишется
    предупреждение MAX_ITER_EXCEEDED.

    Args:
        ps (PathSet): Пути.
        net (Network): Сеть.
        omega (float): Уровень шума omega > 0.
        tol (float): Допуск невязки.
        max_iter (int): Предельное число итераций.
        step_rule (StepRule): Правило выбора шага.
        x0 (np.ndarray | None): Начальная точка, по умолчанию равномерная.

    Returns:
        SueSolution: Равновесие и сведения о сходимости.
    """
    positive_validator(omega)
    step_rule = StepRule(step_rule)
    x = _start(ps, x0)
    best_x, best_residual = x, np.inf
    iterations = 0
    for iterations in range(max_iter + 1):
        target = logit_choice(path_costs(ps, net, x), omega)
        residual = float(np.abs(x - target).max())
        if residual < best_residual:
            best_x, best_residual = x, residual
        if residual <= tol or iterations == max_iter:
            break
        direction = target - x
        if step_rule is StepRule.MSA:
            step = 2.0 / (iterations + 2)
        else:
            step = _line_search(
                lambda gamma: _slope(
                    direction,
                    path_costs(ps, net, x + gamma * direction)
                    + omega * np.log(np.maximum(x + gamma * direction, TINY)),
                ),
                1.0,
            )
            if step == 0.0:
                break
        x = x + step * direction

    converged = best_residual <= tol
    if not converged:
        logger.warning(
            'MAX_ITER_EXCEEDED: SUE omega = %s, невязка %.3e после %s '
            'итераций.', omega, best_residual, iterations,
        )
    else:
        logger.debug('SUE omega = %s: %s итераций.', omega, iterations)
    y = ps.edge_flows(best_x)
    return SueSolution(
        flow=RouteFlow(best_x, Scale.SHARES),
        y=y,
        costs=path_costs(ps, net, best_x),
        objective=sue_objective(ps, net, best_x, omega),
        residual=best_residual,
        iterations=iterations,
        converged=converged,
    )


def solve_wardrop(
    ps: PathSet,
    net: Network,
    tol: float = Tolerances.EQUILIBRIUM.value,
    max_iter: int = Limits.EQUILIBRIUM_MAX_ITER.value,
    x0: np.ndarray | None = None,
) -> WardropSolution:
    """Равновесие Вардропа методом условного градиента с шагами от вершин.

    Линейная подзадача - кратчайший по текущим затратам путь (при
    равенстве первый в порядке перебора). Шаг к нему чередуется с шагом
    от самого дорогого используемого пути, длина шага ищется точно.
    Остановка по невязке sum_p x_p (G_p - min G) <= tol.

    Returns:
        WardropSolution: y*, одно из равновесных x и сертификат gap.
    """
    x = _start(ps, x0)
    gap, iterations = np.inf, 0
    for iterations in range(max_iter + 1):
        costs = path_costs(ps, net, x)
        average = float(x @ costs)
        toward = int(np.argmin(costs))
        gap = average - float(costs[toward])
        if gap <= tol or iterations == max_iter:
            break
        support = np.flatnonzero(x > 0)
        away = int(support[np.argmax(costs[support])])
        away_gap = float(costs[away]) - average

        away_step = away_gap > gap and x[away] < 1.0
        if not away_step:
            direction = -x.copy()
            direction[toward] += 1.0
            upper = 1.0
        else:
            direction = x.copy()
            direction[away] -= 1.0
            upper = x[away] / (1.0 - x[away])
        step = _line_search(
            lambda gamma: _slope(
                direction, path_costs(ps, net, x + gamma * direction)
            ),
            upper,
        )
        if step == 0.0:
            break
        x = x + step * direction
        if away_step and step == upper:
            x[away] = 0.0
        x = np.maximum(x, 0.0)
        x /= x.sum()

    converged = gap <= tol
    if not converged:
        logger.warning(
            'MAX_ITER_EXCEEDED: Вардроп, невязка %.3e после %s итераций.',
            gap, iterations,
        )
    y = ps.edge_flows(x)
    return WardropSolution(
        flow=RouteFlow(x, Scale.SHARES),
        y=y,
        costs=path_costs(ps, net, x),
        gap=float(gap),
        objective=beckmann_potential(ps, net, x),
        iterations=iterations,
        converged=converged,
    )


def _feasible_fiber(theta: np.ndarray, y_star: np.ndarray) -> bool:
    result = linprog(
        np.zeros(theta.shape[1]),
        A_eq=np.vstack([theta, np.ones(theta.shape[1])]),
        b_eq=np.append(y_star, 1.0),
        bounds=(0, None),
        method='highs',
    )
    return result.status == 0


def select_entropy_pathflow(
    ps: PathSet,
    y_star: np.ndarray,
    tol: float = Tolerances.EQUILIBRIUM.value,
    max_iter: int = 200,
) -> RouteFlow:
    """Распределение по путям с наибольшей энтропией при потоках y* по рёбрам.

    Решение имеет вид x_p ~ exp(sum_e theta[e, p] mu_e); множители mu
    находятся методом Ньютона для двойственной задачи. Пути через рёбра с
    нулевым потоком исключаются заранее, допустимость проверяется задачей
    линейного программирования.

    Raises:
        ValidationError: Нет x на симплексе с theta x = y* (INFEASIBLE_TARGET)
            или невязка больше tol после max_iter шагов (MAX_ITER_EXCEEDED).
    """
    if ps.m == 1:
        return RouteFlow(np.ones(1), Scale.SHARES)
    y_star = np.asarray(y_star, dtype=float)
    idle = y_star <= tol
    keep = ~(ps.theta[idle] > 0).any(axis=0)
    theta = ps.theta[:, keep]
    if not keep.any() or not _feasible_fiber(theta, y_star):
        raise ValidationError(
            'Потоки по рёбрам не раскладываются по путям.',
            code=ErrorCodes.INFEASIBLE_TARGET.value,
        )

    used = ~idle
    theta_used, target = theta[used], y_star[used]
    mu = np.zeros(theta_used.shape[0])

    def dual(mu: np.ndarray) -> float:
        return float(mu @ target - logsumexp(theta_used.T @ mu))

    x = softmax(theta_used.T @ mu)
    for _ in range(max_iter):
        violation = target - theta_used @ x
        if np.abs(violation).max() <= tol:
            break
        weighted = theta_used * x
        hessian = weighted @ theta_used.T - np.outer(
            theta_used @ x, theta_used @ x
        )
        newton = np.linalg.lstsq(hessian, violation, rcond=None)[0]
        step, current = 1.0, dual(mu)
        while step > 1e-12 and dual(mu + step * newton) < current:
            step /= 2
        mu = mu + step * newton
        x = softmax(theta_used.T @ mu)
    else:
        residual = float(np.abs(target - theta_used @ x).max())
        if residual > tol:
            raise ValidationError(
                f'Выбор по энтропии: невязка {residual:.3e} после '
                f'{max_iter} итераций.',
                code=ErrorCodes.MAX_ITER_EXCEEDED.value,
            )

    flow = np.zeros(ps.m)
    flow[keep] = x
    return RouteFlow(flow, Scale.SHARES)


@dataclass(frozen=True, eq=False)
class CorollaryReport:
    """Сходимость SUE к распределению с наибольшей энтропией при omega -> 0.

    Attributes:
        omegas (list[float]): Сетка omega.
        distances (list[float]): ||x_sue(omega) - x_entropy||_2.
        reference (RouteFlow): Распределение с наибольшей энтропией.
        monotone (bool): Расстояния не возрастают.
        final (float): Расстояние при последнем omega.
        passed (bool): Монотонность и final <= 1e-2.
    """
    omegas: list[float]
    distances: list[float]
    reference: RouteFlow
    monotone: bool
    final: float
    passed: bool


def _check_omega_grid(omega_grid: list[float]) -> None:
    if (
        not omega_grid
        or min(omega_grid) <= 0
        or any(
            later >= earlier
            for earlier, later in zip(omega_grid, omega_grid[1:])
        )
    ):
        raise ValidationError(
            'Сетка omega должна быть непустой, положительной и строго '
            f'убывающей, получено {omega_grid}.',
            code=ErrorCodes.INVALID_RANGE.value,
        )


def corollary_sweep(
    ps: PathSet,
    net: Network,
    omega_grid: list[float],
    tol: float = Tolerances.EQUILIBRIUM.value,
    threshold: float = 1e-2,
) -> CorollaryReport:
    """Расстояния от SUE до распределения с наибольшей энтропией.

    Raises:
        ValidationError: Пустая, неположительная или не убывающая сетка
            omega (INVALID_RANGE).
    """
    omega_grid = [float(omega) for omega in omega_grid]
    _check_omega_grid(omega_grid)
    wardrop = solve_wardrop(ps, net, tol=tol)
    reference = select_entropy_pathflow(ps, wardrop.y, tol=max(tol, 1e-9))
    distances = [
        float(np.linalg.norm(
            solve_sue(ps, net, omega, tol=tol).flow.x - reference.x
        ))
        for omega in omega_grid
    ]
    monotone = all(
        later <= earlier + tol
        for earlier, later in zip(distances, distances[1:])
    )
    final = distances[-1]
    return CorollaryReport(
        omegas=omega_grid,
        distances=distances,
        reference=reference,
        monotone=monotone,
        final=final,
        passed=monotone and final <= threshold,
    )
