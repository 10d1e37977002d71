import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import random_tree
from ihrlevy.errors import DimensionTooLarge, InvalidWeights
from ihrlevy.graph import Graph
from ihrlevy.ising import (
    IsingModel,
    OrthantWeights,
    ising_weights,
    orthant_index,
    orthant_label,
    orthant_signs,
    parse_orthant_label,
    tree_weights,
)


def test_orthant_encoding_roundtrip():
    signs = orthant_signs(4)
    assert np.array_equal(signs[0], np.ones(4))
    assert np.array_equal(orthant_index(signs), np.arange(16))
    assert orthant_label(0, 3) == "111"
    assert orthant_label(1, 3) == "011"
    for s in range(8):
        assert parse_orthant_label(orthant_label(s, 3)) == s


def test_zero_interactions_give_uniform_weights():
    g = Graph(4, [(0, 1), (1, 2), (1, 3)])
    w = ising_weights(IsingModel.zeros(g))
    assert_allclose(w.gamma, 2.0 ** -3)


def test_two_dim_same_sign_probability():
    m = IsingModel.from_edges(2, {(0, 1): 0.5})
    p = m.probabilities()
    same = p[0] + p[3]
    assert_allclose(same, np.exp(0.5) / (np.exp(0.5) + np.exp(-0.5)), rtol=1e-12)
    assert_allclose(ising_weights(m).pair_positive_mass(0, 1), same, rtol=1e-12)


def test_log_partition_brute_force(rng):
    g = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    m = IsingModel.from_vector(g, rng.normal(size=4))
    z = 0.0
    for o in itertools.product([1, -1], repeat=4):
        o = np.array(o)
        z += np.exp(0.5 * o @ m.psi @ o)
    assert_allclose(m.log_partition(), np.log(z), rtol=1e-12)


def test_marginal_constraint_random(rng):
    for _ in range(30):
        d = int(rng.integers(2, 9))
        g = Graph.complete(d)
        psi = rng.normal(size=len(g))
        w = ising_weights(IsingModel.from_vector(g, psi))
        assert_allclose(w.marginal_sums(), 1.0, atol=1e-12)


def test_tree_product_form(rng):
    for d in (2, 3, 6):
        tree = random_tree(rng, d)
        m = IsingModel.from_vector(tree, rng.uniform(-1, 1, size=d - 1))
        assert_allclose(tree_weights(m).gamma, ising_weights(m).gamma, rtol=1e-12)


def test_weights_validation():
    with pytest.raises(InvalidWeights):
        OrthantWeights(np.ones(3))
    with pytest.raises(InvalidWeights):
        OrthantWeights([-0.1, 1.1, 1, 0])
    with pytest.raises(InvalidWeights):
        OrthantWeights([0.5, 0.5, 0.5, 0.2]).validate()
    assert OrthantWeights.uniform(3).validate().d == 3


def test_psi_support_must_follow_graph():
    g = Graph(3, [(0, 1)])
    psi = np.zeros((3, 3))
    psi[0, 2] = psi[2, 0] = 1.0
    with pytest.raises(ValueError):
        IsingModel(psi, g)


def test_enumeration_limit():
    with pytest.raises(DimensionTooLarge):
        IsingModel.zeros(Graph(26, [(0, 1)])).log_partition()
