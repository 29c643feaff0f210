"""Логит динамика: N агентов пересматривают пути.

Каждый агент пересматривает выбор с интенсивностью lam, суммарная
интенсивность lam N не зависит от состояния. При пересмотре новый путь
выбирается по логит правилу при текущих затратах G(x / N).
"""
import logging

import numpy as np
from core.enums import ErrorCodes, Limits, RngIds
from core.validators import RangeValidator, positive_validator
from django.core.exceptions import ValidationError
from kinetics.models import KineticsTrajectory, Snapshot
from kinetics.statistics import largest_remainder
from routes.equilibrium import logit_choice, path_costs
from routes.models import Network, PathSet

logger = logging.getLogger(__name__)


def _initial_counts(
    ps: PathSet,
    N: int,
    x0: np.ndarray | None,
) -> np.ndarray:
    if x0 is None:
        return largest_remainder(np.full(ps.m, 1.0 / ps.m), N)
    x0 = np.asarray(x0, dtype=np.int64)
    if x0.shape != (ps.m,) or x0.min() < 0 or int(x0.sum()) != N:
        raise ValidationError(
            f'Начальное распределение должно лежать в S_m(N), N = {N}.',
            code=ErrorCodes.OUT_OF_POLYTOPE.value,
        )
    return x0.copy()


def simulate_logit_dynamics(
    ps: PathSet,
    net: Network,
    N: int,
    lam: float,
    omega: float,
    horizon_events: int,
    sample_every: int,
    seed: int,
    x0: np.ndarray | None = None,
) -> KineticsTrajectory:
    """Моделирует логит динамику событие за событием.

    Args:
        ps (PathSet): Пути.
        net (Network): Сеть, затраты вычисляются в долях.
        N (int): Число агентов.
        lam (float): Интенсивность пересмотра одного агента.
        omega (float): Уровень шума omega > 0.
        horizon_events (int): Число событий.
        sample_every (int): Шаг снимков в событиях.
        seed (int): Зерно генератора.
        x0 (np.ndarray | None): Начальные численности по путям,
            по умолчанию поровну.

    Returns:
        KineticsTrajectory: Снимки векторов x (численности по путям).
    """
    RangeValidator(low=1, low_inclusive=True, field='N')(N)
    positive_validator(lam)
    positive_validator(omega)
    RangeValidator(low=1, low_inclusive=True, field='horizon_events')(
        horizon_events
    )
    RangeValidator(low=1, low_inclusive=True, field='sample_every')(
        sample_every
    )
    x = _initial_counts(ps, N, x0)
    rng = np.random.default_rng(seed)
    total_rate = lam * N
    t = 0.0
    samples = [Snapshot(0, t, x.copy())]
    uniforms, cursor = np.empty((0, 3)), 0

    for event in range(1, horizon_events + 1):
        if cursor == len(uniforms):
            uniforms, cursor = rng.random((Limits.RANDOM_BATCH.value, 3)), 0
        u_wait, u_agent, u_choice = uniforms[cursor]
        cursor += 1
        t += -np.log1p(-u_wait) / total_rate

        reviser = min(
            int(np.searchsorted(np.cumsum(x), u_agent * N, side='right')),
            ps.m - 1,
        )
        choice = np.cumsum(logit_choice(path_costs(ps, net, x / N), omega))
        chosen = min(
            int(np.searchsorted(choice, u_choice * choice[-1], side='right')),
            ps.m - 1,
        )
        x[reviser] -= 1
        x[chosen] += 1
        if event % sample_every == 0:
            samples.append(Snapshot(event, t, x.copy()))

    logger.info(
        'Логит динамика: %s событий, N = %s, omega = %s, зерно %s.',
        horizon_events, N, omega, seed,
    )
    return KineticsTrajectory(
        samples=samples,
        events=horizon_events,
        seed=seed,
        rng_id=RngIds.PCG64.value,
        population=N,
    )
