import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from potapov.blaschke import (BPFactor, BPProduct, FiniteBlaschkeProduct, bp_eval, bp_from_json, bp_inverse_samples,
                              bp_to_json, canonicalize, expand, theta_from_json)
from potapov.fixtures import random_bp
from potapov.funcspace import grid_points, inner_residual, is_two_sided_inner, sup_distance

from conftest import two_by_two_divisor

V2 = np.array([[1, -1], [1, 1]]) / np.sqrt(2)


def test_factor_values():
    z = 0.3 + 0.1j
    assert np.allclose(bp_eval(BPFactor(0, np.eye(2)), z), z * np.eye(2))
    assert np.allclose(bp_eval(BPFactor(0.4, np.zeros((2, 2))), z), np.eye(2))


def test_product_reproduces_two_by_two_divisor():
    B = BPProduct(V2, [BPFactor(0, np.diag([0, 1]))])
    z = grid_points(8)
    assert np.allclose(B(z), two_by_two_divisor()(z))


def test_invalid_inputs():
    with pytest.raises(ValueError):
        BPFactor(1.0, np.eye(2))
    with pytest.raises(ValueError):
        BPFactor(0.1, np.array([[1, 1], [0, 0]]))
    with pytest.raises(ValueError):
        BPProduct(2 * np.eye(2), [])
    with pytest.raises(ValueError):
        FiniteBlaschkeProduct([0.1], unimodular=2)


def test_order_matters(rng):
    P, Q = np.diag([1.0, 0]), np.full((2, 2), 0.5)
    a, b = 0.3, -0.5j
    AB = BPProduct(np.eye(2), [BPFactor(a, P), BPFactor(b, Q)])
    BA = BPProduct(np.eye(2), [BPFactor(b, Q), BPFactor(a, P)])
    z = 0.2 + 0.2j
    assert not np.allclose(AB(z), BA(z))
    assert np.allclose(AB(z), BPFactor(a, P)(z) @ BPFactor(b, Q)(z))


def test_expand_examples(rng):
    assert sup_distance(expand(BPProduct(np.eye(3), [])), np.eye(3)) == 0
    E = expand(BPProduct(np.eye(2), [BPFactor(0, np.eye(2))]))
    assert np.allclose(E(0.5), 0.5 * np.eye(2))
    B = random_bp(rng, 4, 3, repeat_prob=0)
    assert inner_residual(expand(B), two_sided=True) < 1e-10


@given(st.integers(0, 2 ** 31 - 1), st.integers(1, 5), st.integers(0, 5))
@settings(max_examples=40, deadline=None)
def test_expansion_agrees_with_product(seed, d, M):
    rng = np.random.default_rng(seed)
    B = random_bp(rng, d, M)
    F = expand(B)
    assert F.degree() <= M
    z = grid_points(F.G)
    assert np.abs(F(z) - B(z)).max() < 1e-10
    assert is_two_sided_inner(F, 1e-10)


def test_inverse_samples(rng):
    f = BPFactor(0.3 - 0.2j, np.diag([1.0, 0, 1]))
    S = bp_inverse_samples(f, 4)
    z = grid_points(16)
    assert np.allclose(f(z) @ S.values, np.eye(3))
    assert np.allclose(bp_inverse_samples(BPFactor(0.5, np.zeros((2, 2)))).values, np.eye(2))
    assert np.allclose(bp_inverse_samples(BPFactor(0, np.eye(1)), 3).values[:, 0, 0], 1 / grid_points(8))


def test_zeros_of_theta():
    th = FiniteBlaschkeProduct([0.3, -0.5j, 0.3])
    F = th.as_function()
    for a in th.zeros:
        assert abs(F(a)[0, 0]) < 1e-12
    assert th.without(0.3).zeros == (-0.5j, 0.3)
    with pytest.raises(ValueError):
        th.without(0.9)


def test_canonicalize_drops_identity_factors():
    B = BPProduct(np.eye(2), [BPFactor(0.1, np.zeros((2, 2))), BPFactor(0.2, np.eye(2))])
    assert canonicalize(B).alphas == [0.2]


def test_json_round_trip(rng):
    B = random_bp(rng, 3, 2)
    C = bp_from_json(bp_to_json(B))
    assert np.allclose(C.unitary, B.unitary)
    assert C.alphas == B.alphas
    assert theta_from_json([[0.5, 0.0]]).zeros == (0.5,)
    with pytest.raises(ValueError):
        bp_from_json({"unitary": None})
