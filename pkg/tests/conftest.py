import os

import django
import numpy as np
import pytest

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'macroflow.settings')
django.setup()

from correspondence.loaders import save_instance  # noqa: E402
from correspondence.models import OdInstance  # noqa: E402
from routes.loaders import save_network  # noqa: E402
from routes.models import Edge, LatencyFn, Network  # noqa: E402
from routes.paths import enumerate_paths  # noqa: E402


def parallel_network(slopes: list[float], stages: int = 1) -> Network:
    """Последовательно соединённые пары параллельных рёбер tau(z) = b z.

    stages = 1 - две параллельные дороги s -> t, stages = 2 - сеть
    s => a => t с четырьмя путями.
    """
    nodes = ['s', 'a', 't'] if stages == 2 else ['s', 't']
    edges = []
    for stage in range(stages):
        for branch in range(2):
            index = 2 * stage + branch
            edges.append(Edge(
                f'e{index}', nodes[stage], nodes[stage + 1],
                LatencyFn.build('affine', 0, slopes[index]),
            ))
    return Network(tuple(edges), 's', 't')


@pytest.fixture
def golden_instance():
    return OdInstance(
        L=[600, 400], W=[500, 500], T=[[1.0, 3.0], [2.0, 1.0]], beta=1.0,
    )


@pytest.fixture
def reference_instance():
    return OdInstance(
        L=[0.6, 0.4], W=[0.5, 0.5], T=[[0.0, 1.0], [1.0, 0.0]], beta=1.0,
    )


@pytest.fixture
def small_instance():
    return OdInstance(
        L=[2, 2], W=[2, 2], T=[[0.0, 1.0], [1.0, 0.0]], beta=1.0,
    )


@pytest.fixture
def random_instance():
    def make(seed: int, n: int | None = None) -> OdInstance:
        rng = np.random.default_rng(seed)
        n = n or int(rng.integers(2, 11))
        l = rng.uniform(0.5, 2.0, n)
        w = rng.uniform(0.5, 2.0, n)
        return OdInstance(
            L=l / l.sum(),
            W=w / w.sum(),
            T=rng.uniform(0.0, 3.0, (n, n)),
            beta=float(rng.uniform(0.0, 5.0)),
        )
    return make


@pytest.fixture
def write_instance(tmp_path):
    def write(inst: OdInstance, stem: str = 'city') -> tuple[str, str]:
        margins = tmp_path / f'{stem}_margins.csv'
        costs = tmp_path / f'{stem}_costs.csv'
        save_instance(inst, margins, costs)
        return str(margins), str(costs)
    return write


@pytest.fixture
def two_link():
    net = parallel_network([1.0, 2.0])
    return net, enumerate_paths(net)


@pytest.fixture
def twin_links():
    net = parallel_network([1.0, 1.0])
    return net, enumerate_paths(net)


@pytest.fixture
def double_parallel():
    net = parallel_network([1.0, 1.5, 1.0, 7.0 / 3.0], stages=2)
    return net, enumerate_paths(net)


@pytest.fixture
def symmetric_double_parallel():
    net = parallel_network([1.0, 1.0, 1.0, 1.0], stages=2)
    return net, enumerate_paths(net)


@pytest.fixture
def write_network(tmp_path):
    def write(net: Network, stem: str = 'network') -> str:
        path = tmp_path / f'{stem}.csv'
        save_network(net, path)
        return str(path)
    return write
