"""Модуль вспомогательных функций.

Чтение и запись табличных файлов, общих для всех приложений:
матрицы в формате CSV без заголовка (затраты, корреспонденции,
результаты опросов).
"""
from pathlib import Path

import numpy as np
import pandas as pd
from core.enums import ErrorCodes
from django.core.exceptions import ValidationError


def read_csv(path: str | Path, **kwargs) -> pd.DataFrame:
    """Читает CSV-файл, сводя все ошибки разбора к PARSE_ERROR.

    Вещественные числа читаются в режиме `round_trip`, чтобы запись и
    повторное чтение давали те же самые значения до бита.

    Raises:
        ValidationError: Файл отсутствует или не разбирается.
    """
    try:
        return pd.read_csv(path, float_precision='round_trip', **kwargs)
    except (OSError, ValueError, pd.errors.ParserError) as exc:
        raise ValidationError(
            f'Не удалось прочитать {path}: {exc}',
            code=ErrorCodes.PARSE_ERROR.value,
        ) from exc


def numeric_values(frame: pd.DataFrame, path: str | Path) -> np.ndarray:
    """Приводит таблицу к числовому массиву.

    Raises:
        ValidationError: В таблице есть нечисловые значения.
    """
    try:
        values = frame.apply(pd.to_numeric, errors='raise').to_numpy()
    except (ValueError, TypeError) as exc:
        raise ValidationError(
            f'{path}: нечисловые значения.',
            code=ErrorCodes.PARSE_ERROR.value,
        ) from exc
    if np.issubdtype(values.dtype, np.integer):
        return values.astype(np.int64)
    return values.astype(float)


def read_matrix(path: str | Path) -> np.ndarray:
    """Читает матрицу: без заголовка, по строкам, через запятую."""
    frame = read_csv(path, header=None)
    if frame.isna().to_numpy().any():
        raise ValidationError(
            f'{path}: строки матрицы разной длины или пустые ячейки.',
            code=ErrorCodes.PARSE_ERROR.value,
        )
    return numeric_values(frame, path)


def write_matrix(path: str | Path, matrix: np.ndarray) -> None:
    pd.DataFrame(np.atleast_2d(matrix)).to_csv(
        path, header=False, index=False
    )
