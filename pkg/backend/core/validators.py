"""Модуль валидаторов.
"""
from math import isfinite

import numpy as np
from core.enums import ErrorCodes
from django.core.exceptions import ValidationError
from django.utils.deconstruct import deconstructible


@deconstructible
class RangeValidator:
    """Проверяет, что число лежит в заданном промежутке.

    Границы по умолчанию не включаются в промежуток, что соответствует
    большинству условий вида `0 < sigma < 0.5`.

    Attrs:
        low (float | None):
            Нижняя граница. `None` - ограничения нет.
        high (float | None):
            Верхняя граница. `None` - ограничения нет.
        low_inclusive (bool):
            Разрешено ли значение, равное нижней границе.
        high_inclusive (bool):
            Разрешено ли значение, равное верхней границе.
        field (str):
            Название проверяемого параметра.

    Raises:
        ValidationError:
            Значение не число или вне промежутка (код INVALID_RANGE).
    """
    low = None
    high = None
    low_inclusive = False
    high_inclusive = False
    field = 'Переданное значение'
    message = '%s = %s вне допустимого промежутка %s%s, %s%s.'

    def __init__(
        self,
        low: float | None = None,
        high: float | None = None,
        low_inclusive: bool | None = None,
        high_inclusive: bool | None = None,
        field: str | None = None,
    ) -> None:
        if low is not None:
            self.low = low
        if high is not None:
            self.high = high
        if low_inclusive is not None:
            self.low_inclusive = low_inclusive
        if high_inclusive is not None:
            self.high_inclusive = high_inclusive
        if field is not None:
            self.field = field

    def __call__(self, value: float) -> None:
        if not isfinite(value) or self._below(value) or self._above(value):
            raise ValidationError(
                self.message % (
                    self.field,
                    value,
                    '[' if self.low_inclusive else '(',
                    '-inf' if self.low is None else self.low,
                    '+inf' if self.high is None else self.high,
                    ']' if self.high_inclusive else ')',
                ),
                code=ErrorCodes.INVALID_RANGE.value,
            )

    def _below(self, value: float) -> bool:
        if self.low is None:
            return False
        if self.low_inclusive:
            return value < self.low
        return value <= self.low

    def _above(self, value: float) -> bool:
        if self.high is None:
            return False
        if self.high_inclusive:
            return value > self.high
        return value >= self.high


positive_validator = RangeValidator(low=0)
nonnegative_validator = RangeValidator(low=0, low_inclusive=True)
sigma_validator = RangeValidator(low=0, high=0.5, field='sigma')


def finite_entries_validator(values: np.ndarray, field: str) -> None:
    """Проверяет, что все элементы массива конечны.

    Raises:
        ValidationError: Найден `nan` или `inf` (код NON_FINITE_ENTRY).
    """
    if not np.all(np.isfinite(values)):
        raise ValidationError(
            f'{field}: найдены нечисловые или бесконечные значения.',
            code=ErrorCodes.NON_FINITE_ENTRY.value,
        )


def nonnegative_entries_validator(values: np.ndarray, field: str) -> None:
    """Проверяет, что все элементы массива конечны и неотрицательны.

    Raises:
        ValidationError: Отрицательный элемент (код NEGATIVE_ENTRY).
    """
    finite_entries_validator(values, field)
    if values.size and values.min() < 0:
        raise ValidationError(
            f'{field}: отрицательный элемент {values.min()}.',
            code=ErrorCodes.NEGATIVE_ENTRY.value,
        )


def square_matrix_validator(matrix: np.ndarray, n: int, field: str) -> None:
    """Проверяет, что матрица имеет размер n x n.

    Raises:
        ValidationError: Размер не совпадает (код DIMENSION_MISMATCH).
    """
    if matrix.ndim != 2 or matrix.shape != (n, n):
        raise ValidationError(
            f'{field}: ожидается матрица {n}x{n}, получено {matrix.shape}.',
            code=ErrorCodes.DIMENSION_MISMATCH.value,
        )


def probability_vector_validator(
    probabilities: np.ndarray,
    field: str,
    tol: float = 1e-9,
) -> None:
    """Проверяет, что массив лежит на вероятностном симплексе.

    Args:
        probabilities (np.ndarray):
            Массив любой формы, сумма элементов которого должна быть 1.
        field (str):
            Название параметра для сообщения об ошибке.
        tol (float):
            Допуск на отклонение суммы от единицы.

    Raises:
        ValidationError:
            Отрицательный элемент или сумма не равна единице.
    """
    nonnegative_entries_validator(probabilities, field)
    total = float(probabilities.sum())
    if abs(total - 1.0) > tol:
        raise ValidationError(
            f'{field}: сумма элементов {total} не равна 1.',
            code=ErrorCodes.INVALID_RANGE.value,
        )
