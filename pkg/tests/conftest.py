import numpy as np
import pytest

from ihrlevy.graph import Graph
from ihrlevy.hr import variogram_from_theta


def random_variogram(rng, d, scale=1.0):
    # squared Euclidean distances of points in general position are strictly CND
    x = rng.normal(scale=np.sqrt(scale), size=(d, d + 5))
    g = ((x[:, None, :] - x[None, :, :]) ** 2).sum(-1)
    return g


def random_tree(rng, d):
    return Graph(d, [(int(rng.integers(v)), v) for v in range(1, d)])


def laplacian_theta(graph, rng, lo=2.0, hi=5.0):
    d = graph.d
    theta = np.zeros((d, d))
    for i, j in graph.sorted_edges():
        theta[i, j] = theta[j, i] = -rng.uniform(lo, hi)
    np.fill_diagonal(theta, -theta.sum(axis=1))
    return theta


def tree_variogram(graph, rng):
    return variogram_from_theta(laplacian_theta(graph, rng))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# acceptance criteria report ---------------------------------------------------

CRITERIA = {}


def record_criterion(number, ok, detail):
    CRITERIA[number] = (bool(ok), detail)
    print(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        ok, detail = CRITERIA[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
