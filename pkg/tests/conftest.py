import numpy as np
import pytest

from qhitting.chains import stationary, transition_from_graph
from qhitting.graphs import Graph, barbell, edges_from_pairs


def path3():
    return Graph(3, False, edges_from_pairs([(0, 1), (1, 2)]))


def k2():
    return Graph(2, False, edges_from_pairs([(0, 1)]))


def complete(n):
    return Graph(n, False, edges_from_pairs([(i, j) for i in range(n) for j in range(i + 1, n)]))


def directed_cycle(n):
    return Graph(n, True, edges_from_pairs([(i, (i + 1) % n) for i in range(n)]))


@pytest.fixture(scope="session")
def barbell90():
    P = transition_from_graph(barbell(30, 30))
    return P, stationary(P)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
