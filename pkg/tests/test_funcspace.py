import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from potapov.errors import CertificationFailure, NotAnalytic
from potapov.funcspace import (GridSamples, MatPoly, RationalMatFn, analytic_part_certify, cancel_den_zeros,
                               compose_blaschke, evaluate, fn_from_json, fn_to_json, from_grid, grid_log2_for,
                               grid_points, is_inner, is_two_sided_inner, multiply, shift_back, sup_distance, tilde,
                               to_grid)

from conftest import diag_b, two_by_two_divisor, zI


def random_fn(rng, r=2, c=2, deg=3, nden=2):
    N = rng.standard_normal((deg + 1, r, c)) + 1j * rng.standard_normal((deg + 1, r, c))
    den = [0.8 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform()) for _ in range(nden)]
    return RationalMatFn(MatPoly(N), den)


def test_grid_size_rule():
    assert 2 ** grid_log2_for(3, 2) >= 4 * 6
    assert grid_log2_for(0) == 2


def test_rational_rejects_poles_inside():
    with pytest.raises(ValueError):
        RationalMatFn(MatPoly(np.eye(2)), [1.0])
    with pytest.raises(ValueError):
        RationalMatFn(MatPoly(np.eye(2)), [], grid_log2=1)


def test_evaluate_rejects_exterior_points():
    with pytest.raises(ValueError):
        evaluate(zI(), 1.5)


@pytest.mark.parametrize("nden", [0, 1, 3])
def test_grid_round_trip(rng, nden):
    F = random_fn(rng, nden=nden)
    back = from_grid(to_grid(F), F.degree(), F.den_zeros)
    assert sup_distance(F, back) < 1e-12


def test_from_grid_flags_negative_frequencies():
    z = grid_points(16)
    S = GridSamples((1 / z)[:, None, None] * np.ones((1, 1, 1)))
    with pytest.raises(NotAnalytic):
        from_grid(S, 2)


def test_from_grid_flags_degree_overflow():
    S = to_grid(zI(1, 5), 5)
    with pytest.raises(CertificationFailure):
        from_grid(S, 2)


def test_analytic_part_of_polynomial(rng):
    F = random_fn(rng, nden=0)
    P = analytic_part_certify(to_grid(F), F.degree())
    assert np.allclose(P.coeffs, F.numerator.coeffs)


def test_multiply_matches_pointwise(rng):
    F, G = random_fn(rng, 2, 3), random_fn(rng, 3, 2)
    H = multiply(F, G)
    z = 0.3 - 0.4j
    assert np.allclose(H(z), F(z) @ G(z), atol=1e-10)


def test_tilde_is_an_involution(rng):
    F = random_fn(rng, 2, 3)
    assert sup_distance(tilde(tilde(F)), F) < 1e-14
    z = 0.2 + 0.5j
    assert np.allclose(tilde(F)(z), F(np.conj(z)).conj().T)


def test_cancel_den_zeros_removes_common_factor():
    a = 0.4 + 0.2j
    # (1 - conj(a) z) * I / (1 - conj(a) z)
    F = RationalMatFn(MatPoly(np.array([np.eye(2), -np.conj(a) * np.eye(2)])), [a])
    G = cancel_den_zeros(F)
    assert G.den_zeros == ()
    assert np.allclose(G.numerator.coeffs, np.eye(2)[None])
    # b_a is not cancellable
    assert len(cancel_den_zeros(diag_b(a)).den_zeros) == 1


@pytest.mark.parametrize("alpha", [0.0, 0.5, -0.3 + 0.6j])
def test_compose_blaschke_round_trip(rng, alpha):
    A = MatPoly(rng.standard_normal((3, 2, 2)) + 0j)
    F = shift_back(A, alpha)
    B = compose_blaschke(F, alpha, degree_bound=2)
    assert np.allclose(B.coeffs, A.coeffs, atol=1e-12)


def test_inner_predicates():
    assert is_two_sided_inner(two_by_two_divisor())
    assert is_two_sided_inner(diag_b(0.3), recheck=True)
    col = RationalMatFn(MatPoly(np.array([[[0.0], [0.0]], [[1.0], [0.0]]])))
    assert is_inner(col)
    assert not is_two_sided_inner(col)
    assert not is_inner(RationalMatFn(MatPoly(np.array([[[1.0, 0], [0, 1]], [[0, 1.0], [0, 0]]]))))


@given(st.integers(0, 2 ** 31 - 1))
@settings(max_examples=25, deadline=None)
def test_json_round_trip(seed):
    F = random_fn(np.random.default_rng(seed))
    G = fn_from_json(fn_to_json(F))
    assert np.array_equal(G.numerator.coeffs, F.numerator.coeffs)
    assert G.den_zeros == F.den_zeros
    assert G.grid_log2 == F.grid_log2


@pytest.mark.parametrize("bad", [{}, {"coeffs": []}, {"coeffs": 1},
                                 {"coeffs": [{"rows": 1, "cols": 1, "data": [[1, 0]]},
                                             {"rows": 1, "cols": 2, "data": [[1, 0], [0, 0]]}]}])
def test_json_rejects_malformed(bad):
    with pytest.raises(ValueError):
        fn_from_json(bad)
