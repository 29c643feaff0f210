"""Точное стационарное распределение процесса обменов.

Для малых задач множество целых точек многогранника A перебирается
полностью, и каждой точке приписывается вес
prod exp(-beta T[i, j] d[i, j]) / d[i, j]!
(проекция произведения распределений Пуассона на A).
"""
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
from core.enums import ErrorCodes, Limits
from correspondence.models import OdInstance
from django.core.exceptions import ValidationError
from kinetics.models import KineticsTrajectory, SwapChannel
from kinetics.simulator import check_state, swap_rate
from scipy.special import gammaln, logsumexp

logger = logging.getLogger(__name__)


def enumerate_states(
    L: np.ndarray,
    W: np.ndarray,
    limit: int = Limits.MAX_STATES.value,
) -> np.ndarray:
    """Перебирает целые матрицы с маргиналами L, W.

    Обход в глубину по клеткам построчно; нижняя граница клетки
    учитывает, сколько ещё могут принять оставшиеся столбцы строки.

    Raises:
        ValidationError: Точек больше limit (STATE_SPACE_TOO_LARGE).

    Returns:
        np.ndarray: Массив K x n^2, состояния развёрнуты по строкам.
    """
    n = len(L)
    row_rem = [int(value) for value in L]
    col_rem = [int(value) for value in W]
    cell_values = [0] * (n * n)
    states = []

    def fill(cell: int) -> None:
        if cell == n * n:
            states.append(list(cell_values))
            if len(states) > limit:
                raise ValidationError(
                    f'Число состояний превышает {limit}.',
                    code=ErrorCodes.STATE_SPACE_TOO_LARGE.value,
                )
            return
        i, j = divmod(cell, n)
        if i == n - 1:
            low = high = col_rem[j]
            if high > row_rem[i]:
                return
        else:
            low = max(0, row_rem[i] - sum(col_rem[j + 1:]))
            high = min(row_rem[i], col_rem[j])
        for value in range(low, high + 1):
            cell_values[cell] = value
            row_rem[i] -= value
            col_rem[j] -= value
            fill(cell + 1)
            row_rem[i] += value
            col_rem[j] += value

    fill(0)
    return np.array(states, dtype=np.int64).reshape(-1, n * n)


@dataclass(frozen=True, eq=False)
class StationaryLaw:
    """Стационарное распределение на целых точках A.

    Attributes:
        n (int): Число районов.
        states (np.ndarray): Состояния K x n^2, развёрнутые по строкам.
        probabilities (np.ndarray): Вероятности состояний, сумма 1.
        log_partition (float): ln Z ненормированных весов.
    """
    n: int
    states: np.ndarray
    probabilities: np.ndarray
    log_partition: float

    def __post_init__(self) -> None:
        object.__setattr__(self, '_index', {
            tuple(state): position
            for position, state in enumerate(self.states.tolist())
        })

    def __len__(self) -> int:
        return len(self.probabilities)

    def probability(self, d: np.ndarray) -> float:
        position = self._index.get(tuple(np.ravel(d).tolist()))
        return 0.0 if position is None else float(
            self.probabilities[position]
        )

    def as_dict(self) -> dict[tuple, float]:
        return dict(zip(
            map(tuple, self.states.tolist()), self.probabilities.tolist()
        ))

    def mode(self) -> np.ndarray:
        """Наиболее вероятное состояние (первое при равенстве)."""
        return self.states[int(np.argmax(self.probabilities))].reshape(
            self.n, self.n
        )

    def to_frame(self) -> pd.DataFrame:
        columns = [
            f'd_{i + 1}_{j + 1}' for i in range(self.n) for j in range(self.n)
        ]
        frame = pd.DataFrame(self.states, columns=columns)
        frame['probability'] = self.probabilities
        return frame


def stationary_exact(
    inst: OdInstance,
    limit: int = Limits.MAX_STATES.value,
) -> StationaryLaw:
    """Точное стационарное распределение на малой задаче.

    Raises:
        ValidationError:
            OUT_OF_POLYTOPE - маргиналы не целые;
            STATE_SPACE_TOO_LARGE - слишком много состояний.
    """
    if not inst.is_integral:
        raise ValidationError(
            'Стационарное распределение определено для целых маргиналов.',
            code=ErrorCodes.OUT_OF_POLYTOPE.value,
        )
    states = enumerate_states(inst.L, inst.W, limit)
    log_weights = (
        -inst.beta * (states @ inst.T.reshape(-1))
        - gammaln(states + 1.0).sum(axis=1)
    )
    log_partition = float(logsumexp(log_weights))
    logger.debug('Перебрано %s состояний, ln Z = %.6g.', len(states),
                 log_partition)
    return StationaryLaw(
        n=inst.n,
        states=states,
        probabilities=np.exp(log_weights - log_partition),
        log_partition=log_partition,
    )


def exchange_image(d: np.ndarray, channel: SwapChannel) -> np.ndarray:
    """Состояние, из которого канал переводит процесс в d."""
    return np.asarray(d, dtype=np.int64) - channel.delta(len(d))


def detailed_balance_residual(
    inst: OdInstance,
    d: np.ndarray,
    channel: SwapChannel,
    law: StationaryLaw | None = None,
    lam: float = 1.0,
) -> float:
    """Невязка условия детального равновесия.

    Сравниваются потоки вероятности между d и d' = d + e_km + e_pq -
    e_pm - e_kq: канал (k, m, p, q) переводит d' в d, канал (p, m, k, q)
    переводит d в d'.

    (d_km + 1)(d_pq + 1) p(d') rate(k, m, p, q) =
        d_pm d_kq p(d) rate(p, m, k, q).

    Args:
        inst (OdInstance): Задача с целыми маргиналами.
        d (np.ndarray): Состояние из A.
        channel (SwapChannel): Канал (k, m, p, q).
        law (StationaryLaw | None): Готовое распределение.
        lam (float): Интенсивность обменов.

    Raises:
        ValidationError:
            INVALID_CHANNEL - единичный канал;
            OUT_OF_POLYTOPE - d или d' не лежит в A.

    Returns:
        float: |LHS - RHS| / max(|LHS|, |RHS|), 0 при обеих частях 0.
    """
    if channel.is_identity:
        raise ValidationError(
            f'Канал {tuple(channel)} не меняет состояние.',
            code=ErrorCodes.INVALID_CHANNEL.value,
        )
    d = np.asarray(d, dtype=np.int64)
    check_state(d, inst)
    image = exchange_image(d, channel)
    if image.min() < 0:
        raise ValidationError(
            f'Канал {tuple(channel)} выводит состояние из A.',
            code=ErrorCodes.OUT_OF_POLYTOPE.value,
        )
    if law is None:
        law = stationary_exact(inst)

    k, m, p, q = channel
    lhs = (
        image[k, m] * image[p, q]
        * law.probability(image)
        * swap_rate(k, m, p, q, inst, lam)
    )
    rhs = (
        d[p, m] * d[k, q]
        * law.probability(d)
        * swap_rate(p, m, k, q, inst, lam)
    )
    scale = max(abs(lhs), abs(rhs))
    return 0.0 if scale == 0 else float(abs(lhs - rhs) / scale)


def occupation_law(traj: KineticsTrajectory) -> dict[tuple, float]:
    """Доли времени, проведённого траекторией в каждом состоянии."""
    total = sum(traj.occupation.values())
    if total <= 0:
        raise ValidationError(
            'Траектория не содержит времени пребывания в состояниях.',
            code=ErrorCodes.INSUFFICIENT_SAMPLES.value,
        )
    return {state: time / total for state, time in traj.occupation.items()}


def total_variation(
    first: dict[tuple, float],
    second: dict[tuple, float],
) -> float:
    return 0.5 * sum(
        abs(first.get(state, 0.0) - second.get(state, 0.0))
        for state in first.keys() | second.keys()
    )
