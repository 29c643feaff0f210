"""Модели кинетики обменов.

Models:
    KineticsState:
        Целочисленная матрица корреспонденций d(t) и момент времени t.
    SwapChannel:
        Канал обмена (k, m, p, q): жители корреспонденций (k, m) и (p, q)
        меняются квартирами и переходят в (p, m) и (k, q).
    Snapshot:
        Снимок состояния в траектории.
    KineticsTrajectory:
        Снимки траектории и сведения для её точного воспроизведения.
"""
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


@dataclass(frozen=True, eq=False)
class KineticsState:
    d: np.ndarray
    t: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, 'd', np.asarray(self.d, dtype=np.int64))


class SwapChannel(NamedTuple):
    """Канал обмена.

    Событие уменьшает d[k, m] и d[p, q] и увеличивает d[p, m] и d[k, q].
    Каналы с k = p или m = q ничего не меняют и не используются.
    """
    k: int
    m: int
    p: int
    q: int

    @property
    def is_identity(self) -> bool:
        return self.k == self.p or self.m == self.q

    def reverse(self) -> 'SwapChannel':
        return SwapChannel(self.p, self.m, self.k, self.q)

    def delta(self, n: int) -> np.ndarray:
        """Изменение матрицы d при срабатывании канала."""
        change = np.zeros((n, n), dtype=np.int64)
        change[self.k, self.m] -= 1
        change[self.p, self.q] -= 1
        change[self.p, self.m] += 1
        change[self.k, self.q] += 1
        return change


class Snapshot(NamedTuple):
    event_index: int
    t: float
    state: np.ndarray


@dataclass(eq=False)
class KineticsTrajectory:
    """Траектория марковского процесса.

    Используется и для обменов (состояние - матрица d), и для логит
    динамики на сети (состояние - вектор потоков по путям x).

    Attributes:
        samples (list[Snapshot]):
            Снимки по расписанию, упорядочены по времени.
        events (int):
            Общее число смоделированных событий.
        seed (int):
            Зерно генератора.
        rng_id (str):
            Название алгоритма генератора.
        population (int):
            Численность N агентов.
        occupation (dict[tuple, float]):
            Суммарное время пребывания в каждом посещённом состоянии,
            заполняется только при `track_occupation=True`.
    """
    samples: list[Snapshot]
    events: int
    seed: int
    rng_id: str
    population: int
    occupation: dict[tuple, float] = field(default_factory=dict)

    def states(self, burn_in: int = 0) -> list[np.ndarray]:
        return [
            snap.state for snap in self.samples
            if snap.event_index >= burn_in
        ]
