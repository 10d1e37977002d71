import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import laplacian_theta, random_tree, random_variogram, tree_variogram
from ihrlevy.completion import complete_variogram
from ihrlevy.eglearn import (
    eglearn_path,
    f1_score,
    graphical_lasso,
    mst_graph,
    neighborhood_selection,
    penalty_grid,
    pseudo_loglik_ic,
    rho_max,
)
from ihrlevy.errors import DisconnectedGraph
from ihrlevy.graph import Graph
from ihrlevy.hr import variogram_from_theta
from ihrlevy.lasso import glasso, lasso_cd


def test_lasso_cd_kkt(rng):
    x = rng.normal(size=(50, 6))
    a = x.T @ x / 50
    b = a @ np.array([1.0, 0, 0, -0.5, 0, 0]) + 0.01 * rng.normal(size=6)
    beta = np.zeros(6)
    lasso_cd(a, b, 0.05, beta)
    g = b - a @ beta
    active = beta != 0
    assert_allclose(g[active], 0.05 * np.sign(beta[active]), atol=1e-7)
    assert np.all(np.abs(g[~active]) <= 0.05 + 1e-7)


def test_lasso_cd_unpenalized_solution(rng):
    x = rng.normal(size=(40, 4))
    a = x.T @ x
    b = rng.normal(size=4)
    beta = np.zeros(4)
    lasso_cd(a, b, 0.0, beta, 1e-12, 100000)
    assert_allclose(beta, np.linalg.solve(a, b), atol=1e-8)


def test_glasso_matches_sklearn(rng):
    sk = pytest.importorskip("sklearn.covariance")
    x = rng.normal(size=(200, 6))
    s = np.cov(x, rowvar=False)
    w, _ = glasso(s, 0.1, tol=1e-10)
    ref_cov, _ = sk.graphical_lasso(s, 0.1, tol=1e-10, max_iter=1000)
    assert_allclose(w, ref_cov, atol=1e-6)


def test_ns_limits(rng):
    gamma = random_variogram(rng, 6)
    assert len(neighborhood_selection(gamma, 0.0)) == 15
    assert len(neighborhood_selection(gamma, 1.01 * rho_max(gamma))) == 0
    assert len(graphical_lasso(gamma, 0.0)) == 15
    assert len(graphical_lasso(gamma, 1.01 * rho_max(gamma))) == 0


def test_ns_recovers_tree_from_exact_gamma():
    tree = Graph(4, [(0, 1), (1, 2), (1, 3)])
    theta = laplacian_theta(tree, np.random.default_rng(0), 2.0, 2.0)
    gamma = variogram_from_theta(theta)
    rho = 0.1 * rho_max(gamma)
    assert neighborhood_selection(gamma, rho).edges == tree.edges


def test_penalty_grid_and_path(rng):
    tree = random_tree(rng, 6)
    gamma = tree_variogram(tree, rng)
    grid = penalty_grid(gamma)
    assert np.all(np.diff(grid) > 0)
    path = eglearn_path(gamma, "ns", n=5000)
    assert len(path.graphs) == len(grid)
    assert path.edge_counts()[0] >= path.edge_counts()[-1]
    t, est = path.select("BIC")
    assert np.isfinite(path.bic[t])
    assert max(f1_score(tree, g) for g in path.graphs) == 1.0


def test_ic_prefers_fewer_edges_for_equal_fit(rng):
    tree = random_tree(rng, 5)
    gamma = tree_variogram(tree, rng)
    est = complete_variogram(gamma, tree)
    full = complete_variogram(gamma, Graph.complete(5))
    # the true tree reproduces gamma, so the complete graph fits no better
    assert_allclose(est.gamma, gamma, atol=1e-10)
    assert pseudo_loglik_ic(gamma, est, 1000, 0.1) < pseudo_loglik_ic(gamma, full, 1000, 0.1)
    aic = pseudo_loglik_ic(gamma, est, 1000, 0.1, "AIC")
    bic = pseudo_loglik_ic(gamma, est, 1000, 0.1, "BIC")
    assert_allclose(bic - aic, (np.log(100) - 2) * 4)


def test_completion_complete_graph_is_identity(rng):
    gamma = random_variogram(rng, 5)
    assert_allclose(complete_variogram(gamma, Graph.complete(5)).gamma, gamma)


def test_completion_tree_path_sums(rng):
    gamma = random_variogram(rng, 7)
    tree = random_tree(rng, 7)
    out = complete_variogram(gamma, tree).gamma
    for i in range(7):
        for j in range(i + 1, 7):
            assert_allclose(out[i, j], sum(gamma[a, b] for a, b in tree.path(i, j)), rtol=1e-12)


def _cycle_graph(d):
    return Graph(d, [(i, (i + 1) % d) for i in range(d)])


@pytest.mark.parametrize("graph", [_cycle_graph(5), Graph(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)])])
def test_completion_zero_precision_off_graph(rng, graph):
    gamma = random_variogram(rng, 5)
    est = complete_variogram(gamma, graph)
    for i, j in graph.sorted_edges():
        assert_allclose(est.gamma[i, j], gamma[i, j], rtol=1e-10)
    for i, j in graph.non_edges():
        assert abs(est.theta[i, j]) < 1e-8


def test_completion_disconnected(rng):
    with pytest.raises(DisconnectedGraph):
        complete_variogram(random_variogram(rng, 4), Graph(4, [(0, 1), (2, 3)]))


def test_mst_path_metric():
    gamma = np.array([[0, 1, 2], [1, 0, 1], [2, 1, 0.0]])
    assert mst_graph(gamma).sorted_edges() == [(0, 1), (1, 2)]
    chi = np.array([[1, 0.6, 0.3], [0.6, 1, 0.5], [0.3, 0.5, 1.0]])
    assert mst_graph(chi, "chi").sorted_edges() == [(0, 1), (1, 2)]


def test_mst_ties_are_lexicographic():
    w = np.ones((4, 4)) - np.eye(4)
    assert mst_graph(w).sorted_edges() == [(0, 1), (0, 2), (0, 3)]


def test_f1_values():
    e = Graph(3, [(0, 1), (1, 2)])
    assert f1_score(e, e) == 1.0
    assert f1_score(Graph(3, [(0, 1)]), Graph(3, [(0, 2)])) == 0.0
    assert_allclose(f1_score(e, Graph(3, [(0, 1)])), 2 / 3)
