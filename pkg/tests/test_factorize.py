import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from potapov.blaschke import BPFactor, BPProduct, FiniteBlaschkeProduct, expand
from potapov.divisors_zn import classify_b_alpha_n
from potapov.errors import NotADivisor, NotInner, NotRational
from potapov.factorize import coprime_factorize, inner_rational_to_bp, peel_step, potapov_peel
from potapov.fixtures import random_bp
from potapov.funcspace import MatPoly, RationalMatFn, is_two_sided_inner, sup_distance, to_grid
from potapov.hardy import right_unitary_align
from potapov.numerics import random_projection, random_unitary

from conftest import const, diag_b, two_by_two_divisor, zI

V2 = np.array([[1, -1], [1, 1]]) / np.sqrt(2)


def test_peel_step_on_theta_itself():
    f, nxt, th, info = peel_step(zI(2), FiniteBlaschkeProduct([0]), 0)
    assert np.allclose(f.proj, np.eye(2))
    assert sup_distance(nxt, np.eye(2)) < 1e-12
    assert th.degree == 0


def test_peel_step_on_trivial_divisor():
    f, nxt, _, _ = peel_step(const(np.eye(3)), FiniteBlaschkeProduct([0]), 0)
    assert np.allclose(f.proj, 0)
    assert sup_distance(nxt, np.eye(3)) < 1e-12


def test_peel_step_on_two_by_two_divisor():
    f, nxt, _, info = peel_step(two_by_two_divisor(), FiniteBlaschkeProduct([0]), 0)
    assert np.allclose(f.proj, np.diag([0, 1]))
    assert sup_distance(nxt, V2) < 1e-12
    assert info.division_residual < 1e-14


def test_peel_theta_times_identity():
    th = FiniteBlaschkeProduct([0, 0.3, -0.5j])
    B, trace = potapov_peel(th.as_function(4), th)
    assert np.allclose(B.unitary, np.eye(4))
    assert B.alphas == list(th.zeros)
    assert all(np.allclose(f.proj, np.eye(4)) for f in B.factors)
    assert sup_distance(expand(B), th.as_function(4)) < 1e-9
    assert len(trace.steps) == 3


def test_peel_constant_unitary(rng):
    W = random_unitary(3, rng)
    B, _ = potapov_peel(const(W), FiniteBlaschkeProduct([0.2, 0.4j]))
    assert B.factors == ()
    assert np.allclose(B.unitary, W)


def test_peel_random_product_with_theta_superset(rng):
    th = FiniteBlaschkeProduct([0.1, -0.6, 0.5j, 0.3 + 0.3j])
    B = BPProduct(random_unitary(6, rng), [BPFactor(a, random_projection(6, 3, rng)) for a in th.zeros[:3]])
    F = expand(B)
    R, _ = potapov_peel(F, th)
    assert sup_distance(expand(R), F) < 1e-8


def test_peel_rejects_non_divisor():
    with pytest.raises(NotADivisor):
        potapov_peel(zI(2, 2), FiniteBlaschkeProduct([0]))


def test_peel_rejects_non_inner():
    with pytest.raises(NotInner):
        potapov_peel(const(2 * np.eye(2)), FiniteBlaschkeProduct([0]))


def test_peel_at_a_point_outside_theta_is_rejected():
    with pytest.raises(ValueError):
        peel_step(diag_b(0.3), FiniteBlaschkeProduct([0.3]), -0.4)


@given(st.integers(0, 2 ** 31 - 1), st.integers(1, 5), st.integers(0, 5))
@settings(max_examples=40, deadline=None)
def test_intermediates_are_two_sided_inner(seed, d, M):
    rng = np.random.default_rng(seed)
    B = random_bp(rng, d, M)
    F = expand(B)
    th = FiniteBlaschkeProduct(B.alphas)
    cur = F
    for a in reversed(th.zeros):
        _, cur, th, info = peel_step(cur, th, a)
        assert is_two_sided_inner(cur, 1e-8)
        assert info.division_residual < 1e-8


def test_peel_agrees_with_single_point_classification(rng):
    a = 0.45j
    B = BPProduct(random_unitary(3, rng), [BPFactor(a, random_projection(3, r, rng)) for r in (1, 2, 2)])
    F = expand(B)
    P, _ = potapov_peel(F, FiniteBlaschkeProduct([a] * 3))
    C = classify_b_alpha_n(F, a, 3)
    _, res = right_unitary_align(expand(P), expand(C.bp))
    assert res < 1e-8


def test_dropping_a_factor_breaks_equality(rng):
    B = random_bp(rng, 3, 3, repeat_prob=0, min_rank=1)
    F = expand(B)
    R, _ = potapov_peel(F, FiniteBlaschkeProduct(B.alphas))
    for i in range(len(R.factors)):
        cut = BPProduct(R.unitary, R.factors[:i] + R.factors[i + 1:])
        assert sup_distance(expand(cut), F) > 1e-8


def test_static_flags_recorded(rng):
    B = random_bp(rng, 3, 3, repeat_prob=0, min_rank=1)
    _, trace = potapov_peel(expand(B), FiniteBlaschkeProduct(B.alphas))
    assert all(s.static_agrees in (True, False) for s in trace.steps)
    # the first peeled zero always uses the original Omega
    assert trace.steps[0].static_agrees


def test_inner_rational_to_bp_examples():
    B = inner_rational_to_bp(zI(2, 3))
    assert len(B.factors) == 3 and all(f.alpha == 0 for f in B.factors)
    B = inner_rational_to_bp(two_by_two_divisor())
    assert np.allclose(B.factors[0].proj, np.diag([0, 1]))
    assert np.allclose(B.unitary, V2)


def test_inner_rational_to_bp_repeated_alpha(rng):
    B = BPProduct(random_unitary(3, rng), [BPFactor(0.4, random_projection(3, r, rng)) for r in (1, 2, 1, 2)])
    F = expand(B)
    R = inner_rational_to_bp(F)
    assert sup_distance(expand(R), F) < 1e-8


def test_inner_rational_to_bp_needs_extra_zeros_at_origin(rng):
    # zeros at the origin do not show up in the denominator
    B = BPProduct(random_unitary(2, rng), [BPFactor(0, random_projection(2, 1, rng)), BPFactor(0.5, np.eye(2))])
    F = expand(B)
    assert sup_distance(expand(inner_rational_to_bp(F)), F) < 1e-8


def test_inner_rational_to_bp_rejects_non_inner():
    with pytest.raises(NotInner):
        inner_rational_to_bp(RationalMatFn(MatPoly(np.array([[[1.0]], [[1.0]]]))))


def test_not_rational_when_budget_exhausted(monkeypatch):
    import potapov.factorize as fz

    def never(*a, **k):
        raise NotADivisor("forced")
    monkeypatch.setattr(fz, "_omega", never)
    with pytest.raises(NotRational):
        inner_rational_to_bp(zI(2))


@pytest.mark.parametrize("Phi, nfac", [(zI(2), 1), (diag_b(0.3), 1)])
def test_coprime_factorize_examples(Phi, nfac):
    D, A = coprime_factorize(Phi)
    assert len(D.factors) == nfac
    g = max(Phi.grid_log2, A.grid_log2) + 1
    SD, SA = to_grid(expand(D), g).values, to_grid(A, g).values
    assert np.abs(SD @ np.conj(np.swapaxes(SA, 1, 2)) - to_grid(Phi, g).values).max() < 1e-8


def test_coprime_factorize_diag_b_divisor():
    D, A = coprime_factorize(diag_b(0.3))
    _, res = right_unitary_align(expand(D), diag_b(0.3))
    assert res < 1e-8
    assert np.trace(D.factors[0].proj).real == pytest.approx(1)


def test_coprime_factorize_scalar():
    a = 0.25 + 0.5j
    Phi = RationalMatFn(MatPoly(np.array([[[-a]], [[1.0]]]) * 1j), [a])   # i b_a
    D, A = coprime_factorize(Phi)
    assert D.alphas == [pytest.approx(a)]
    S = to_grid(A).values
    assert np.abs(S - S[0]).max() < 1e-10
    assert abs(abs(S[0, 0, 0]) - 1) < 1e-10
