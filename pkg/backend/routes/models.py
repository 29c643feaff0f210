"""Модели игры выбора маршрута.

Models:
    LatencyFn:
        Удельные затраты на ребре как функция потока в долях z = y / N.
    Edge:
        Ориентированное ребро сети с функцией затрат.
    Network:
        Транспортная сеть с одной парой источник - сток.
    PathSet:
        Пути из источника в сток и матрица инцидентности ребро - путь.
    RouteFlow:
        Распределение потока по путям.
"""
from dataclasses import dataclass
from typing import NamedTuple

import networkx as nx
import numpy as np
from core.enums import Defaults, ErrorCodes, LatencyKind, Scale
from core.validators import RangeValidator, finite_entries_validator
from django.core.exceptions import ValidationError

PARAM_COUNT = {
    LatencyKind.CONSTANT: 1,
    LatencyKind.AFFINE: 2,
    LatencyKind.BPR: 3,
}


class LatencyFn(NamedTuple):
    """Функция затрат ребра.

    CONSTANT(T): tau(z) = T (допускаются отрицательные T, см. облачную
    модель); AFFINE(a, b): tau(z) = a + b z, b >= 0;
    BPR(t0, c, alpha): tau(z) = t0 (1 + alpha (z / c)^4), c > 0.
    """
    kind: LatencyKind
    params: tuple[float, ...]

    @classmethod
    def build(cls, kind: LatencyKind | str, *params: float) -> 'LatencyFn':
        """Создаёт функцию, проверяя число и допустимость параметров.

        Raises:
            ValidationError: Параметры не задают неубывающую функцию.
        """
        kind = LatencyKind(kind)
        params = tuple(float(value) for value in params[:PARAM_COUNT[kind]])
        if len(params) != PARAM_COUNT[kind]:
            raise ValidationError(
                f'Для {kind.value} нужно {PARAM_COUNT[kind]} параметра.',
                code=ErrorCodes.PARSE_ERROR.value,
            )
        finite_entries_validator(np.array(params), kind.value)
        if kind is LatencyKind.AFFINE:
            RangeValidator(low=0, low_inclusive=True, field='b')(params[1])
        elif kind is LatencyKind.BPR:
            RangeValidator(low=0, low_inclusive=True, field='t0')(params[0])
            RangeValidator(low=0, field='capacity')(params[1])
            RangeValidator(low=0, low_inclusive=True, field='alpha')(params[2])
        return cls(kind, params)

    def __call__(self, z: float) -> float:
        if self.kind is LatencyKind.CONSTANT:
            return self.params[0]
        if self.kind is LatencyKind.AFFINE:
            a, b = self.params
            return a + b * z
        t0, capacity, alpha = self.params
        return t0 * (1 + alpha * (z / capacity) ** Defaults.BPR_POWER.value)

    def integral(self, z: float) -> float:
        """Первообразная, равная нулю в нуле."""
        if self.kind is LatencyKind.CONSTANT:
            return self.params[0] * z
        if self.kind is LatencyKind.AFFINE:
            a, b = self.params
            return a * z + b * z * z / 2
        t0, capacity, alpha = self.params
        power = Defaults.BPR_POWER.value
        return t0 * (z + alpha * z ** (power + 1)
                     / ((power + 1) * capacity ** power))


class Edge(NamedTuple):
    edge_id: str
    tail: str
    head: str
    latency: LatencyFn


@dataclass(frozen=True, eq=False)
class Network:
    """Сеть с выделенными источником и стоком.

    Затраты по всем рёбрам вычисляются векторно: коэффициенты функций
    собираются в массивы при создании сети.

    Attributes:
        edges (tuple[Edge, ...]): Рёбра, индекс ребра - его позиция.
        source (str): Источник.
        sink (str): Сток.
    """
    edges: tuple[Edge, ...]
    source: str
    sink: str

    def __post_init__(self) -> None:
        object.__setattr__(self, 'edges', tuple(self.edges))
        if self.source == self.sink:
            raise ValidationError(
                'Источник и сток совпадают.',
                code=ErrorCodes.INVALID_RANGE.value,
            )
        # Столбцы: постоянная часть, линейный коэффициент, коэффициент
        # при z^4 / c^4 (для BPR t0 * alpha).
        coefficients = np.zeros((len(self.edges), 4))
        for index, edge in enumerate(self.edges):
            params = edge.latency.params
            if edge.latency.kind is LatencyKind.CONSTANT:
                coefficients[index, 0] = params[0]
            elif edge.latency.kind is LatencyKind.AFFINE:
                coefficients[index, :2] = params
            else:
                t0, capacity, alpha = params
                coefficients[index] = (t0, 0.0, t0 * alpha, capacity)
        object.__setattr__(self, '_coefficients', coefficients)

    @property
    def nodes(self) -> list[str]:
        seen = dict.fromkeys([self.source])
        for edge in self.edges:
            seen.update(dict.fromkeys([edge.tail, edge.head]))
        seen.update(dict.fromkeys([self.sink]))
        return list(seen)

    def graph(self) -> nx.MultiDiGraph:
        """Мультиграф networkx, ключ ребра - его индекс."""
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(self.nodes)
        for index, edge in enumerate(self.edges):
            graph.add_edge(edge.tail, edge.head, key=index)
        return graph

    def _bpr_ratio(self, y: np.ndarray) -> np.ndarray:
        capacity = self._coefficients[:, 3]
        ratio = np.divide(y, capacity, out=np.zeros_like(y),
                          where=capacity > 0)
        return ratio ** Defaults.BPR_POWER.value

    def latencies(self, y: np.ndarray) -> np.ndarray:
        """Затраты tau_e(y_e) всех рёбер при потоках y в долях."""
        y = np.asarray(y, dtype=float)
        const, slope, bpr = self._coefficients[:, :3].T
        return const + slope * y + bpr * self._bpr_ratio(y)

    def potentials(self, y: np.ndarray) -> np.ndarray:
        """Интегралы затрат от 0 до y_e по каждому ребру."""
        y = np.asarray(y, dtype=float)
        const, slope, bpr = self._coefficients[:, :3].T
        power = Defaults.BPR_POWER.value
        return (
            const * y + slope * y * y / 2
            + bpr * y * self._bpr_ratio(y) / (power + 1)
        )


@dataclass(frozen=True, eq=False)
class PathSet:
    """Набор путей.

    Attributes:
        paths (tuple[tuple[int, ...], ...]): Пути как кортежи индексов рёбер.
        theta (np.ndarray): Матрица |E| x m, theta[e, p] = 1, если ребро e
            лежит на пути p.
        truncated (bool): Перебор остановлен на ограничении числа путей.
    """
    paths: tuple[tuple[int, ...], ...]
    theta: np.ndarray
    truncated: bool = False

    @classmethod
    def from_paths(
        cls,
        paths: list[tuple[int, ...]],
        edge_count: int,
        truncated: bool = False,
    ) -> 'PathSet':
        theta = np.zeros((edge_count, len(paths)))
        for column, path in enumerate(paths):
            theta[list(path), column] = 1.0
        return cls(tuple(map(tuple, paths)), theta, truncated)

    @property
    def m(self) -> int:
        return len(self.paths)

    def edge_flows(self, x: np.ndarray) -> np.ndarray:
        return self.theta @ np.asarray(x, dtype=float)

    def labels(self, net: Network) -> list[str]:
        """Пути в виде цепочек идентификаторов рёбер."""
        return [
            '-'.join(net.edges[index].edge_id for index in path)
            for path in self.paths
        ]


@dataclass(frozen=True, eq=False)
class RouteFlow:
    x: np.ndarray
    scale: Scale = Scale.SHARES

    def __post_init__(self) -> None:
        object.__setattr__(self, 'x', np.asarray(self.x, dtype=float))

    def to_shares(self, total: float) -> 'RouteFlow':
        if self.scale is Scale.SHARES:
            return self
        return RouteFlow(self.x / total, Scale.SHARES)

    def to_counts(self, total: float) -> 'RouteFlow':
        if self.scale is Scale.COUNTS:
            return self
        return RouteFlow(self.x * total, Scale.COUNTS)
