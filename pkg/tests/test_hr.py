import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose
from scipy import integrate, stats

from conftest import random_tree, random_variogram, tree_variogram
from ihrlevy.errors import DomainError, InvalidPrecision, InvalidVariogram, RequiresProjection
from ihrlevy.hr import (
    HRParams,
    chi_from_gamma,
    edges_from_params,
    extremal_coefficient,
    gamma_from_chi,
    hr_density_unnormalized,
    hr_exponent_density,
    hr_normalizing_constant,
    is_valid_variogram,
    project_cnd,
    sigma_k,
    theta_from_variogram,
    validate_variogram,
    variogram_from_theta,
)


def test_theta_two_by_two():
    g = 1.7
    theta = theta_from_variogram([[0, g], [g, 0]])
    assert_allclose(theta, np.array([[1, -1], [-1, 1]]) / g, atol=1e-12)
    assert_allclose(variogram_from_theta(theta), [[0, g], [g, 0]], atol=1e-12)


def test_tree_metric_gives_zero_precision():
    gamma = np.array([[0, 2, 4], [2, 0, 2], [4, 2, 0.0]])
    theta = theta_from_variogram(gamma)
    assert abs(theta[0, 2]) < 1e-12
    assert abs(theta[0, 1]) > 0.1


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2**31 - 1))
def test_duality_roundtrip_property(d, seed):
    rng = np.random.default_rng(seed)
    gamma = random_variogram(rng, d)
    theta = theta_from_variogram(gamma)
    assert_allclose(theta @ np.ones(d), 0, atol=1e-10 * max(1, np.abs(theta).max()))
    assert_allclose(variogram_from_theta(theta), gamma, atol=1e-9 * gamma.max())


def test_rejects_invalid_inputs():
    with pytest.raises(InvalidPrecision):
        variogram_from_theta(np.zeros((3, 3)))
    with pytest.raises(InvalidVariogram):
        validate_variogram([[0, 1], [2, 0]])
    with pytest.raises(InvalidVariogram):
        validate_variogram([[1, 1], [1, 0]])
    # negative definite direction: -gamma is not CND
    assert not is_valid_variogram(-np.array([[0, 1, 1], [1, 0, 1], [1, 1, 0.0]]))


def test_density_value_two_dim():
    # log(x2/x1) ~ N(-gamma/2, gamma); evaluated at x=(1,1): phi(gamma/2; var gamma)
    g = 2.0
    expected = stats.norm.pdf(g / 2, scale=np.sqrt(g))
    assert_allclose(hr_exponent_density([1.0, 1.0], [[0, g], [g, 0]]), expected, rtol=1e-12)
    assert_allclose(expected, 0.219695644733861, rtol=1e-12)


def test_density_k_invariance(rng):
    for d in (2, 3, 5):
        gamma = random_variogram(rng, d, 0.5)
        x = np.exp(rng.normal(size=(7, d)))
        vals = [hr_exponent_density(x, gamma, k) for k in range(d)]
        for v in vals[1:]:
            assert_allclose(v, vals[0], rtol=1e-10)


def test_density_matches_exponential_family_form(rng):
    gamma = random_variogram(rng, 4, 0.5)
    x = np.exp(rng.normal(size=(5, 4)))
    c = hr_normalizing_constant(gamma)
    assert_allclose(hr_exponent_density(x, gamma), c * hr_density_unnormalized(x, gamma), rtol=1e-10)


def test_density_homogeneity(rng):
    gamma = random_variogram(rng, 3)
    x = np.exp(rng.normal(size=3))
    assert_allclose(hr_exponent_density(2.5 * x, gamma), 2.5 ** -4 * hr_exponent_density(x, gamma), rtol=1e-10)


def test_density_domain():
    with pytest.raises(DomainError):
        hr_exponent_density([1.0, 0.0], [[0, 1], [1, 0]])


@pytest.mark.parametrize("z", [0.5, 2.0])
def test_density_marginal_two_dim(z):
    gamma = np.array([[0, 1.3], [1.3, 0]])
    f = lambda x2, x1: hr_exponent_density(np.array([x1, x2]), gamma)
    # substitution x2 = x1 * exp(u) keeps the integrand smooth
    val, _ = integrate.dblquad(lambda u, x1: f(x1 * np.exp(u), x1) * x1 * np.exp(u), z, np.inf, -30, 30)
    assert_allclose(val, 1 / z, rtol=1e-6)


def test_sigma_k_requires_projection():
    bad = np.array([[0, 1, 10], [1, 0, 1], [10, 1, 0.0]])
    with pytest.raises(RequiresProjection):
        sigma_k(bad, 0)


def test_sigma_k_is_inverse_of_reduced_theta(rng):
    gamma = random_variogram(rng, 5)
    theta = theta_from_variogram(gamma)
    for m in range(5):
        idx = [i for i in range(5) if i != m]
        assert_allclose(sigma_k(gamma, m), np.linalg.inv(theta[np.ix_(idx, idx)]), rtol=1e-8)


def test_chi_values():
    assert_allclose(chi_from_gamma(4.0), 2 - 2 * stats.norm.cdf(1.0), rtol=1e-12)
    assert_allclose(chi_from_gamma(4.0), 0.31731050786, rtol=1e-9)
    assert chi_from_gamma(1e-12) > 0.9999
    assert chi_from_gamma(1e4) < 1e-20
    assert_allclose(gamma_from_chi(chi_from_gamma(3.3)), 3.3, rtol=1e-10)
    with pytest.raises(DomainError):
        chi_from_gamma(0.0)


def test_extremal_coefficient_bivariate_relation():
    g = 2.5
    theta = extremal_coefficient(np.array([[0, g], [g, 0]]))
    assert_allclose(2 - theta, chi_from_gamma(g), rtol=1e-12)


def test_extremal_coefficient_consistent_across_methods(rng):
    # d=3 closed form vs the Monte Carlo estimator used for larger d
    gamma = random_variogram(rng, 3, 0.3)
    exact = extremal_coefficient(gamma)
    # append a far-away component; its contribution is close to 1
    g4 = np.zeros((4, 4))
    g4[:3, :3] = gamma
    g4[3, :3] = g4[:3, 3] = 400.0
    assert_allclose(extremal_coefficient(g4), exact + 1.0, rtol=3e-3)
    # fixed internal stream
    assert extremal_coefficient(g4) == extremal_coefficient(g4)


def test_project_cnd():
    gamma = np.array([[0, 2, 4], [2, 0, 2], [4, 2, 0.0]])
    assert np.array_equal(project_cnd(gamma), gamma)
    out = project_cnd(-gamma)
    assert is_valid_variogram(out)
    out = project_cnd(np.array([[0, -1.0], [-1.0, 0]]))
    assert out[0, 1] >= 1e-6 and is_valid_variogram(out)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2**31 - 1))
def test_project_cnd_always_valid(d, seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(d, d))
    m = m + m.T
    np.fill_diagonal(m, 0)
    assert is_valid_variogram(project_cnd(m))


def test_edges_from_params():
    theta = np.array([[1, -1, 0], [-1, 2, -1], [0, -1, 1.0]])
    psi = np.zeros((3, 3))
    assert edges_from_params(theta, psi).sorted_edges() == [(0, 1), (1, 2)]
    psi[0, 2] = psi[2, 0] = 0.3
    assert (0, 2) in edges_from_params(theta, psi)
    full = -np.ones((3, 3)) + 3 * np.eye(3)
    assert len(edges_from_params(full, np.zeros((3, 3)))) == 3


def test_hrparams_graph_of_tree(rng):
    tree = random_tree(rng, 7)
    hr = HRParams(tree_variogram(tree, rng))
    assert hr.graph().sorted_edges() == tree.sorted_edges()
    assert hr.sigma(0).shape == (6, 6)


def test_homogeneity_order(rng):
    for d in (2, 4):
        gamma = random_variogram(rng, d, 0.5)
        x = np.exp(rng.normal(size=d))
        t = 3.7
        assert_allclose(hr_exponent_density(t * x, gamma) * t ** (d + 1), hr_exponent_density(x, gamma), rtol=1e-8)


def test_edge_set_invariant_to_scaling(rng):
    tree = random_tree(rng, 6)
    gamma = tree_variogram(tree, rng)
    a, b = HRParams(gamma), HRParams(4.0 * gamma)
    assert_allclose(b.theta, a.theta / 4.0, atol=1e-10)
    assert a.graph().edges == b.graph().edges == tree.edges


def test_chi_gamma_roundtrip_grid():
    g = np.linspace(0.05, 30, 50)
    assert_allclose(gamma_from_chi(chi_from_gamma(g)), g, rtol=1e-9)
