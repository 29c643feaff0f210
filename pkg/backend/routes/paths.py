import logging

import networkx as nx
from core.enums import ErrorCodes, Limits
from django.core.exceptions import ValidationError
from routes.models import Network, PathSet

logger = logging.getLogger(__name__)


def enumerate_paths(
    net: Network,
    max_paths: int = Limits.MAX_PATHS.value,
) -> PathSet:
    """Перебирает простые пути из источника в сток.

    Пути упорядочены лексикографически по индексам рёбер. Если путей
    больше max_paths, сохраняются первые max_paths найденных, пишется
    предупреждение PATH_LIMIT_HIT и набор помечается `truncated`.

    Raises:
        ValidationError: Сток недостижим из источника (NO_PATH).
    """
    graph = net.graph()
    if not nx.has_path(graph, net.source, net.sink):
        raise ValidationError(
            f'Нет пути из {net.source} в {net.sink}.',
            code=ErrorCodes.NO_PATH.value,
        )
    paths, truncated = [], False
    for edge_path in nx.all_simple_edge_paths(graph, net.source, net.sink):
        if len(paths) == max_paths:
            truncated = True
            break
        paths.append(tuple(key for _, _, key in edge_path))
    if truncated:
        logger.warning(
            'PATH_LIMIT_HIT: перебор путей остановлен на %s.', max_paths
        )
    return PathSet.from_paths(sorted(paths), len(net.edges), truncated)
