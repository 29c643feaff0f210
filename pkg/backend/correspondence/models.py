"""Модели предметной области расчёта матрицы корреспонденций.

Models:
    OdInstance:
        Постановка задачи: районы, численности выезжающих и приезжающих,
        матрица затрат и параметр beta.
    Correspondence:
        Матрица корреспонденций d в абсолютных значениях или долях.
    DualPotentials:
        Потенциалы районов lam_l, lam_w (двойственные множители к
        ограничениям на маргиналы).
    FeasibilityReport:
        Результат проверки принадлежности матрицы многограннику A.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from core.enums import ErrorCodes, Scale, Tolerances
from core.validators import (RangeValidator, nonnegative_entries_validator,
                             square_matrix_validator)
from django.core.exceptions import ValidationError

logger = logging.getLogger(__name__)


def _as_margin(values) -> np.ndarray:
    """Хранит маргиналы целыми, если все они целые, иначе вещественными."""
    array = np.asarray(values, dtype=float)
    if array.size and np.all(np.isfinite(array)) and np.all(
        array == np.round(array)
    ):
        return array.astype(np.int64)
    return array


@dataclass(frozen=True, eq=False)
class OdInstance:
    """Постановка задачи расчёта матрицы корреспонденций.

    Attributes:
        L (np.ndarray):
            Число выезжающих из каждого района (длина n).
        W (np.ndarray):
            Число приезжающих в каждый район (длина n).
        T (np.ndarray):
            Матрица затрат на проезд n x n, конечная и неотрицательная.
        beta (float):
            Параметр beta >= 0 (обратная величина к характерным затратам).

    Суммы целых L и W должны совпадать точно, вещественных - с точностью
    до ошибки округления. Допускается n = 1 (вырожденная задача без
    обменов), загрузчик требует n >= 2. Условие n^2 << N не требуется,
    при его нарушении пишется предупреждение.
    """
    L: np.ndarray
    W: np.ndarray
    T: np.ndarray
    beta: float

    def __post_init__(self) -> None:
        object.__setattr__(self, 'L', _as_margin(self.L))
        object.__setattr__(self, 'W', _as_margin(self.W))
        object.__setattr__(self, 'T', np.asarray(self.T, dtype=float))
        object.__setattr__(self, 'beta', float(self.beta))

        if self.L.ndim != 1 or self.L.shape != self.W.shape or not self.n:
            raise ValidationError(
                f'Маргиналы разной длины: {self.L.shape} и {self.W.shape}.',
                code=ErrorCodes.DIMENSION_MISMATCH.value,
            )
        nonnegative_entries_validator(self.L, 'L')
        nonnegative_entries_validator(self.W, 'W')
        square_matrix_validator(self.T, self.n, 'T')
        nonnegative_entries_validator(self.T, 'T')
        RangeValidator(low=0, low_inclusive=True, field='beta')(self.beta)

        if self.is_integral:
            differ = self.L.sum() != self.W.sum()
        else:
            differ = not np.isclose(self.L.sum(), self.W.sum(), rtol=1e-12)
        if differ:
            raise ValidationError(
                f'Суммы маргиналов различаются: {self.L.sum()} '
                f'и {self.W.sum()}.',
                code=ErrorCodes.MARGIN_TOTALS_DIFFER.value,
            )
        if self.n ** 2 * 10 > self.N:
            logger.warning(
                'Условие n^2 << N не выполнено: n = %s, N = %s.',
                self.n, self.N,
            )

    @property
    def n(self) -> int:
        return int(self.L.shape[0])

    @property
    def N(self) -> int | float:
        total = self.L.sum()
        if np.issubdtype(self.L.dtype, np.integer):
            return int(total)
        return float(total)

    @property
    def is_integral(self) -> bool:
        return bool(
            np.issubdtype(self.L.dtype, np.integer)
            and np.issubdtype(self.W.dtype, np.integer)
        )

    def shares(self) -> tuple[np.ndarray, np.ndarray]:
        """Нормированные маргиналы l = L / N, w = W / N."""
        total = float(self.N)
        return self.L / total, self.W / total

    def with_beta(self, beta: float) -> 'OdInstance':
        return OdInstance(self.L, self.W, self.T, beta)


@dataclass(frozen=True, eq=False)
class Correspondence:
    """Матрица корреспонденций.

    Attributes:
        d (np.ndarray):
            Неотрицательная матрица n x n.
        scale (Scale):
            COUNTS - сумма элементов равна N, SHARES - сумма равна 1.
    """
    d: np.ndarray
    scale: Scale = Scale.SHARES

    def __post_init__(self) -> None:
        object.__setattr__(self, 'd', np.asarray(self.d, dtype=float))

    def to_shares(self, total: float) -> 'Correspondence':
        if self.scale is Scale.SHARES:
            return self
        return Correspondence(self.d / total, Scale.SHARES)

    def to_counts(self, total: float) -> 'Correspondence':
        if self.scale is Scale.COUNTS:
            return self
        return Correspondence(self.d * total, Scale.COUNTS)


@dataclass(frozen=True, eq=False)
class DualPotentials:
    """Потенциалы притяжения/отталкивания районов.

    Определены с точностью до общей аддитивной константы: прибавление c
    ко всем lam_l и lam_w не меняет гравитационную матрицу.
    Каноническая калибровка фиксирует lam_l[0] = 0.
    """
    lam_l: np.ndarray
    lam_w: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, 'lam_l', np.asarray(self.lam_l, dtype=float))
        object.__setattr__(self, 'lam_w', np.asarray(self.lam_w, dtype=float))
        if self.lam_l.shape != self.lam_w.shape:
            raise ValidationError(
                'Векторы потенциалов разной длины.',
                code=ErrorCodes.DIMENSION_MISMATCH.value,
            )

    def shifted(self, constant: float) -> 'DualPotentials':
        return DualPotentials(self.lam_l + constant, self.lam_w + constant)

    def canonical(self) -> 'DualPotentials':
        return self.shifted(-self.lam_l[0])

    def scaled(self, factor: float) -> 'DualPotentials':
        return DualPotentials(self.lam_l * factor, self.lam_w * factor)


@dataclass(frozen=True, eq=False)
class FeasibilityReport:
    row_violation: float
    col_violation: float
    min_entry: float
    tol: float
    passed: bool = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            'passed',
            bool(
                self.row_violation <= self.tol
                and self.col_violation <= self.tol
                and self.min_entry >= -self.tol
            ),
        )


def check_feasible(
    c: Correspondence,
    inst: OdInstance,
    tol: float = Tolerances.FEASIBILITY.value,
) -> FeasibilityReport:
    """Проверяет принадлежность матрицы многограннику A.

    Маргиналы сравниваются в той же шкале, в которой задана матрица:
    L, W для COUNTS и l, w для SHARES.

    Args:
        c (Correspondence): Проверяемая матрица.
        inst (OdInstance): Задача, задающая маргиналы.
        tol (float): Допуск на нарушения.

    Returns:
        FeasibilityReport:
            Максимальные нарушения строк и столбцов, минимальный элемент
            и итог проверки.
    """
    square_matrix_validator(c.d, inst.n, 'd')
    if c.scale is Scale.SHARES:
        rows, cols = inst.shares()
    else:
        rows, cols = inst.L.astype(float), inst.W.astype(float)
    return FeasibilityReport(
        row_violation=float(np.abs(c.d.sum(axis=1) - rows).max()),
        col_violation=float(np.abs(c.d.sum(axis=0) - cols).max()),
        min_entry=float(c.d.min()),
        tol=tol,
    )
