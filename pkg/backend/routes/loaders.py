"""Чтение и запись сети и отчётов о равновесии.

Файл сети:
    source=<id>,sink=<id>
    edge_id,tail,head,kind,param1,param2,param3
    e1,s,t,affine,0,1,
    ...
"""
from pathlib import Path

import numpy as np
import pandas as pd
from core.enums import ErrorCodes, LatencyKind
from core.services import read_csv
from django.core.exceptions import ValidationError
from routes.models import Edge, LatencyFn, Network, PathSet

EDGE_COLUMNS = (
    'edge_id', 'tail', 'head', 'kind', 'param1', 'param2', 'param3',
)
TEXT_COLUMNS = {'edge_id': str, 'tail': str, 'head': str, 'kind': str}


def _read_endpoints(path: str | Path) -> tuple[str, str]:
    try:
        with open(path, encoding='utf-8') as file:
            first_line = file.readline().strip()
    except OSError as exc:
        raise ValidationError(
            f'Не удалось прочитать {path}: {exc}',
            code=ErrorCodes.PARSE_ERROR.value,
        ) from exc
    endpoints = dict(
        part.split('=', 1) for part in first_line.split(',') if '=' in part
    )
    if set(endpoints) != {'source', 'sink'}:
        raise ValidationError(
            f'{path}: первая строка должна иметь вид source=<id>,sink=<id>.',
            code=ErrorCodes.PARSE_ERROR.value,
        )
    return endpoints['source'].strip(), endpoints['sink'].strip()


def load_network(path: str | Path) -> Network:
    """Загружает сеть из CSV.

    Raises:
        ValidationError:
            PARSE_ERROR - неверный формат, неизвестный вид функции
            или не хватает параметров.
    """
    source, sink = _read_endpoints(path)
    frame = read_csv(path, skiprows=1, dtype=TEXT_COLUMNS)
    if tuple(frame.columns) != EDGE_COLUMNS:
        raise ValidationError(
            f'{path}: ожидается заголовок {",".join(EDGE_COLUMNS)}.',
            code=ErrorCodes.PARSE_ERROR.value,
        )
    edges = []
    for row in frame.itertuples(index=False):
        try:
            kind = LatencyKind(row.kind.strip().lower())
        except (AttributeError, ValueError) as exc:
            raise ValidationError(
                f'{path}: неизвестный вид функции затрат {row.kind!r}.',
                code=ErrorCodes.PARSE_ERROR.value,
            ) from exc
        params = [
            value for value in (row.param1, row.param2, row.param3)
            if not pd.isna(value)
        ]
        edges.append(Edge(
            row.edge_id, row.tail, row.head, LatencyFn.build(kind, *params)
        ))
    return Network(tuple(edges), source, sink)


def save_network(net: Network, path: str | Path) -> None:
    rows = []
    for edge in net.edges:
        params = list(edge.latency.params) + [None] * (
            3 - len(edge.latency.params)
        )
        rows.append(
            [edge.edge_id, edge.tail, edge.head, edge.latency.kind.value]
            + params
        )
    with open(path, 'w', encoding='utf-8') as file:
        file.write(f'source={net.source},sink={net.sink}\n')
        pd.DataFrame(rows, columns=EDGE_COLUMNS).to_csv(file, index=False)


def path_frame(
    ps: PathSet,
    net: Network,
    x: np.ndarray | None = None,
    costs: np.ndarray | None = None,
) -> pd.DataFrame:
    """Таблица путей: номер, рёбра и, если заданы, поток и затраты."""
    frame = pd.DataFrame({
        'path': np.arange(1, ps.m + 1),
        'edges': ps.labels(net),
    })
    if x is not None:
        frame['x'] = x
    if costs is not None:
        frame['G'] = costs
    return frame


def edge_frame(net: Network, y: np.ndarray) -> pd.DataFrame:
    return pd.DataFrame({
        'edge_id': [edge.edge_id for edge in net.edges],
        'y': y,
        'tau': net.latencies(y),
    })
