"""Загрузка и сохранение постановок задачи и результатов расчёта.

Форматы:
    margins CSV - заголовок `district,L,W` и n строк данных;
    cost CSV - матрица n x n без заголовка;
    potentials CSV - заголовок `district,lamL,lamW`.
"""
import logging
from collections.abc import Mapping
from pathlib import Path

import numpy as np
import pandas as pd
from core.enums import ErrorCodes, Limits, Tolerances
from core.services import numeric_values, read_csv, read_matrix, write_matrix
from correspondence.models import DualPotentials, OdInstance
from django.core.exceptions import ValidationError

logger = logging.getLogger(__name__)

MARGIN_COLUMNS = ('district', 'L', 'W')
POTENTIAL_COLUMNS = ('district', 'lamL', 'lamW')


def _read_margins(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    frame = read_csv(path)
    if tuple(frame.columns) != MARGIN_COLUMNS:
        raise ValidationError(
            f'{path}: ожидается заголовок {",".join(MARGIN_COLUMNS)}, '
            f'получено {",".join(map(str, frame.columns))}.',
            code=ErrorCodes.PARSE_ERROR.value,
        )
    if frame[['L', 'W']].isna().to_numpy().any():
        raise ValidationError(
            f'{path}: пустые значения маргиналов.',
            code=ErrorCodes.PARSE_ERROR.value,
        )
    values = numeric_values(frame[['L', 'W']], path)
    return values[:, 0], values[:, 1]


def _rebalance(L: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Приводит сумму W к сумме L при относительном расхождении <= 1e-9.

    Raises:
        ValidationError: Расхождение больше допустимого.
    """
    total_l, total_w = L.sum(), W.sum()
    if total_l == total_w:
        return W
    mismatch = abs(total_l - total_w) / max(abs(total_l), abs(total_w))
    if mismatch > Tolerances.REBALANCE.value:
        raise ValidationError(
            f'Суммы маргиналов различаются: {total_l} и {total_w} '
            f'(относительное расхождение {mismatch:.3e}).',
            code=ErrorCodes.MARGIN_TOTALS_DIFFER.value,
        )
    logger.info('Маргиналы W перенормированы, расхождение %.3e.', mismatch)
    return W.astype(float) * (float(total_l) / float(total_w))


def load_instance(
    margins_file: str | Path,
    cost_file: str | Path,
    params: Mapping,
) -> OdInstance:
    """Загружает и проверяет постановку задачи.

    Args:
        margins_file (str | Path):
            CSV с заголовком `district,L,W`.
        cost_file (str | Path):
            CSV с матрицей затрат n x n без заголовка.
        params (Mapping):
            Параметры запуска, используется ключ `beta`.

    Raises:
        ValidationError:
            PARSE_ERROR, DIMENSION_MISMATCH, NEGATIVE_ENTRY,
            NON_FINITE_ENTRY или MARGIN_TOTALS_DIFFER.

    Returns:
        OdInstance: Проверенная постановка задачи.
    """
    L, W = _read_margins(margins_file)
    T = read_matrix(cost_file).astype(float)

    if L.shape[0] < Limits.MIN_DISTRICTS.value:
        raise ValidationError(
            f'{margins_file}: районов меньше {Limits.MIN_DISTRICTS.value}.',
            code=ErrorCodes.DIMENSION_MISMATCH.value,
        )
    if T.shape != (L.shape[0], L.shape[0]):
        raise ValidationError(
            f'{cost_file}: матрица {T.shape} при {L.shape[0]} районах.',
            code=ErrorCodes.DIMENSION_MISMATCH.value,
        )
    if min(L.min(), W.min()) < 0:
        raise ValidationError(
            'Отрицательные маргиналы.',
            code=ErrorCodes.NEGATIVE_ENTRY.value,
        )
    W = _rebalance(L, W)
    return OdInstance(L=L, W=W, T=T, beta=float(params.get('beta', 0.0)))


def save_instance(
    inst: OdInstance,
    margins_file: str | Path,
    cost_file: str | Path,
) -> None:
    """Сохраняет постановку задачи в формате, который читает load_instance.
    """
    pd.DataFrame({
        'district': np.arange(1, inst.n + 1),
        'L': inst.L,
        'W': inst.W,
    }).to_csv(margins_file, index=False)
    write_matrix(cost_file, inst.T)


def potentials_frame(potentials: DualPotentials) -> pd.DataFrame:
    return pd.DataFrame({
        'district': np.arange(1, potentials.lam_l.shape[0] + 1),
        'lamL': potentials.lam_l,
        'lamW': potentials.lam_w,
    })
