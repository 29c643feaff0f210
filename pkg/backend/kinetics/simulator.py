"""Точное (событие за событием) моделирование обменов квартирами.

Каждому упорядоченному каналу (k, m, p, q), k != p, m != q, отвечает
интенсивность d[k, m] * d[p, q] * swap_rate(k, m, p, q). Одна и та же
пара жителей учитывается двумя каналами - (k, m, p, q) и (p, q, k, m),
этот множитель 2 входит в параметр интенсивности lam. На стационарное
распределение он не влияет, а проверка детального равновесия использует
то же соглашение в обеих частях равенства.
"""
import logging
from itertools import product

import numpy as np
from core.enums import ErrorCodes, Limits, RngIds
from core.validators import RangeValidator, positive_validator
from correspondence.models import OdInstance
from django.core.exceptions import ValidationError
from kinetics.models import (KineticsState, KineticsTrajectory, Snapshot,
                             SwapChannel)

logger = logging.getLogger(__name__)


def swap_rate(
    k: int,
    m: int,
    p: int,
    q: int,
    inst: OdInstance,
    lam: float,
) -> float:
    """Интенсивность обмена для одной пары жителей.

    lam / N * exp(R(T[k, m]) + R(T[p, q]) - R(T[p, m]) - R(T[k, q])),
    где R(T) = beta * T / 2: затраты до обмена минус затраты после.
    """
    T, half_beta = inst.T, inst.beta / 2
    exponent = half_beta * (T[k, m] + T[p, q] - T[p, m] - T[k, q])
    return float(lam / inst.N * np.exp(exponent))


def swap_channels(n: int) -> list[SwapChannel]:
    """Все неединичные каналы в лексикографическом порядке."""
    return [
        channel
        for channel in map(SwapChannel._make, product(range(n), repeat=4))
        if not channel.is_identity
    ]


def in_polytope(d: np.ndarray, inst: OdInstance) -> bool:
    return bool(
        d.min() >= 0
        and np.array_equal(d.sum(axis=1), inst.L)
        and np.array_equal(d.sum(axis=0), inst.W)
    )


def check_state(d: np.ndarray, inst: OdInstance) -> None:
    """Проверяет, что целочисленное состояние лежит в A.

    Raises:
        ValidationError: OUT_OF_POLYTOPE.
    """
    if (
        not inst.is_integral
        or d.shape != (inst.n, inst.n)
        or not in_polytope(d, inst)
    ):
        raise ValidationError(
            'Состояние не принадлежит целочисленному многограннику A.',
            code=ErrorCodes.OUT_OF_POLYTOPE.value,
        )


class ExchangeProcess:
    """Марковский процесс обменов, моделируемый методом Гиллеспи.

    После события пересчитываются только каналы, которые используют одну
    из четырёх изменившихся клеток.

    Attributes:
        d (np.ndarray): Текущее состояние, развёрнутое по строкам.
        t (float): Текущее время.
        events (int): Число произошедших событий.
    """

    def __init__(
        self,
        inst: OdInstance,
        d0: KineticsState,
        lam: float,
        seed: int,
    ) -> None:
        check_state(d0.d, inst)
        positive_validator(lam)
        n = inst.n
        self.n = n
        self.d = d0.d.reshape(-1).copy()
        self.t = float(d0.t)
        self.events = 0
        self.rng = np.random.default_rng(seed)
        self._uniforms = np.empty((0, 2))
        self._cursor = 0

        channels = swap_channels(n)
        self.channels = channels
        self.rates = np.array(
            [swap_rate(*channel, inst, lam) for channel in channels]
        )
        self.lose_a = np.array([c.k * n + c.m for c in channels], dtype=int)
        self.lose_b = np.array([c.p * n + c.q for c in channels], dtype=int)
        self.gain_a = np.array([c.p * n + c.m for c in channels], dtype=int)
        self.gain_b = np.array([c.k * n + c.q for c in channels], dtype=int)
        self._affected = self._affected_channels()
        self.propensities = (
            self.d[self.lose_a] * self.d[self.lose_b] * self.rates
        ).astype(float) if channels else np.zeros(0)

    def _affected_channels(self) -> list[np.ndarray]:
        touching = [[] for _ in range(self.n * self.n)]
        for index, (a, b) in enumerate(zip(self.lose_a, self.lose_b)):
            touching[a].append(index)
            touching[b].append(index)
        return [
            np.unique(np.concatenate([
                np.asarray(touching[cell], dtype=int)
                for cell in (a, b, c, d)
            ]))
            for a, b, c, d in zip(
                self.lose_a, self.lose_b, self.gain_a, self.gain_b
            )
        ]

    def _uniform_pair(self) -> tuple[float, float]:
        if self._cursor == len(self._uniforms):
            self._uniforms = self.rng.random((Limits.RANDOM_BATCH.value, 2))
            self._cursor = 0
        first, second = self._uniforms[self._cursor]
        self._cursor += 1
        return first, second

    def state(self) -> np.ndarray:
        return self.d.reshape(self.n, self.n).copy()

    def step(self) -> tuple[int, float]:
        """Выполняет одно событие.

        Raises:
            ValidationError:
                EMPTY_PROPENSITY - все интенсивности равны нулю.

        Returns:
            tuple[int, float]:
                Номер сработавшего канала и время ожидания события.
        """
        cumulative = np.cumsum(self.propensities)
        total = cumulative[-1] if cumulative.size else 0.0
        if total <= 0:
            raise ValidationError(
                'Все интенсивности нулевые: поглощающее состояние.',
                code=ErrorCodes.EMPTY_PROPENSITY.value,
            )
        u_wait, u_pick = self._uniform_pair()
        wait = -np.log1p(-u_wait) / total
        index = min(
            int(np.searchsorted(cumulative, u_pick * total, side='right')),
            len(cumulative) - 1,
        )

        d = self.d
        d[self.lose_a[index]] -= 1
        d[self.lose_b[index]] -= 1
        d[self.gain_a[index]] += 1
        d[self.gain_b[index]] += 1
        affected = self._affected[index]
        self.propensities[affected] = (
            d[self.lose_a[affected]]
            * d[self.lose_b[affected]]
            * self.rates[affected]
        )
        self.t += wait
        self.events += 1
        return index, wait


def simulate(
    inst: OdInstance,
    d0: KineticsState,
    lam: float,
    horizon_events: int,
    sample_every: int,
    seed: int,
    track_occupation: bool = False,
) -> KineticsTrajectory:
    """Моделирует обмены до заданного числа событий.

    Args:
        inst (OdInstance): Задача с целыми маргиналами.
        d0 (KineticsState): Начальное состояние из A.
        lam (float): Интенсивность обменов lam > 0.
        horizon_events (int): Число событий.
        sample_every (int): Шаг снимков в событиях (снимок 0 - начальный).
        seed (int): Зерно генератора.
        track_occupation (bool):
            Накопить время пребывания в каждом состоянии.

    Raises:
        ValidationError:
            OUT_OF_POLYTOPE, INVALID_RANGE или EMPTY_PROPENSITY.

    Returns:
        KineticsTrajectory: Траектория, воспроизводимая по (seed, rng_id).
    """
    RangeValidator(low=1, low_inclusive=True, field='horizon_events')(
        horizon_events
    )
    RangeValidator(low=1, low_inclusive=True, field='sample_every')(
        sample_every
    )
    process = ExchangeProcess(inst, d0, lam, seed)
    samples = [Snapshot(0, process.t, process.state())]
    occupation: dict[tuple, float] = {}

    for event in range(1, horizon_events + 1):
        key = tuple(process.d.tolist()) if track_occupation else None
        _, wait = process.step()
        if track_occupation:
            occupation[key] = occupation.get(key, 0.0) + wait
        if event % sample_every == 0:
            samples.append(Snapshot(event, process.t, process.state()))

    logger.info(
        'Обмены: %s событий, t = %.4g, зерно %s.',
        process.events, process.t, seed,
    )
    return KineticsTrajectory(
        samples=samples,
        events=process.events,
        seed=seed,
        rng_id=RngIds.PCG64.value,
        population=int(inst.N),
        occupation=occupation,
    )
