"""Облачная модель как игра выбора маршрута с одной парой источник - сток.

Из облака-источника ведут рёбра во все районы проживания i (затраты
lam_l[i]), из них - во все районы работы j (затраты T[i, j]), из районов
работы - в облако-сток (затраты -lam_w[j]). Путь i -> j соответствует
корреспонденции (i, j), поэтому x совпадает с d, развёрнутой по строкам.
"""
from correspondence.models import DualPotentials, OdInstance
from routes.models import Edge, LatencyFn, Network, PathSet
from routes.paths import enumerate_paths

SOURCE = 'src'
SINK = 'dst'


def cloud_network(
    inst: OdInstance,
    potentials: DualPotentials,
) -> tuple[Network, PathSet]:
    """Строит облачную сеть и её n^2 путей в порядке (i, j) по строкам.

    Стохастическое равновесие этой сети при omega = 1 / beta совпадает
    с результатом `solve_cloud` для тех же потенциалов.
    """
    n = inst.n
    edges = [
        Edge(f'L{i + 1}', SOURCE, f'L{i + 1}',
             LatencyFn.build('constant', potentials.lam_l[i]))
        for i in range(n)
    ]
    edges += [
        Edge(f'T{i + 1}_{j + 1}', f'L{i + 1}', f'W{j + 1}',
             LatencyFn.build('constant', inst.T[i, j]))
        for i in range(n) for j in range(n)
    ]
    edges += [
        Edge(f'W{j + 1}', f'W{j + 1}', SINK,
             LatencyFn.build('constant', -potentials.lam_w[j]))
        for j in range(n)
    ]
    net = Network(tuple(edges), SOURCE, SINK)
    return net, enumerate_paths(net, max_paths=n * n)
