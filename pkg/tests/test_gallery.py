import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from potapov.gallery import (EXAMPLES, Piece, ShiftSymbol, adjoint, analytic_witness, compose, coordinate,
                             example_1_3_delta, example_1_3_theta, identity, is_analytic,
                             is_two_sided_inner_symbolic, left_divides, quasinormal_check, right_divides,
                             rule_table, shift, shift_vs_coordinate_coprime, tables_equal, toeplitz_bracket)

D, T = example_1_3_delta(), example_1_3_theta()
ONE = sp.Integer(1)


def rows(A, window):
    return rule_table(A, window).rows


def test_delta_adjoint_rule():
    # e_n -> e_{n-1} z^-1 for n >= 1, e_{n-1} for n <= 0
    for n, r in rows(adjoint(D), (-6, 6)).items():
        assert r == (n - 1, -1 if n >= 1 else 0, 1)


def test_delta_star_delta_is_identity():
    ok, _ = tables_equal(compose(adjoint(D), D), identity(), (-6, 6))
    assert ok


def test_delta_star_theta_three_cases():
    for n, r in rows(compose(adjoint(D), T), (-6, 6)).items():
        if n < 1:
            assert r == (-n, 1, 1)
        elif n == 1:
            assert r == (-1, 2, 1)
        else:
            assert r == (-n, 0, 1)


def test_inner_and_analytic_flags():
    for A in (D, T, identity()):
        assert is_analytic(A) and is_two_sided_inner_symbolic(A)
    assert not is_two_sided_inner_symbolic(shift("Z+"))
    assert is_two_sided_inner_symbolic(coordinate("Z+"))


def test_theta_delta_star_witness():
    TDs = compose(T, adjoint(D))
    assert not is_analytic(TDs)
    assert analytic_witness(TDs, (-8, 8)) == (3, -1, -1)


@pytest.mark.parametrize("W", [8, 12])
def test_example_1_3_divisibility(W):
    window = (-W, W)
    assert left_divides(D, T, window)
    assert not right_divides(D, T, window)
    rep = EXAMPLES["1.3"](W)
    assert rep["witness"] == {"index": 3, "target": -1, "power": -1}
    assert not rep["witness_escaped"]


@pytest.mark.parametrize("W", [8, 12])
def test_example_1_4(W):
    S, I = shift("Z+"), identity("Z+")
    assert right_divides(S, I, (0, W))
    assert not left_divides(S, I, (0, W))


@pytest.mark.parametrize("A", [D, T, shift("Z+"), coordinate("Z+")])
def test_divides_itself(A):
    assert left_divides(A, A, (-6, 6)) and right_divides(A, A, (-6, 6))


def test_bracket_values():
    assert toeplitz_bracket(adjoint(shift("Z+")), {(0, 1): ONE}) == -1
    assert toeplitz_bracket(shift("Z+"), {(0, 0): ONE}) == 1
    assert toeplitz_bracket(identity("Z+"), {(0, 0): ONE, (2, 3): sp.I}) == 0


@pytest.mark.parametrize("n", [0, 1, 2])
def test_shift_powers_are_quasinormal(n):
    rep = quasinormal_check(shift("Z+", n), (0, 8))
    assert rep and rep.non_normal_witness == 0


def test_identity_is_isometric_and_normal():
    rep = quasinormal_check(identity("Z+"), (0, 6))
    assert rep.isometric and rep.non_normal_witness is None


def test_backward_shift_is_not_quasinormal():
    rep = quasinormal_check(adjoint(shift("Z+")), (0, 6))
    assert not rep
    assert rep.failing_index[0] == 0


@pytest.mark.parametrize("W", [12, 16])
def test_shift_vs_coordinate(W):
    right, left, rk, lk = shift_vs_coordinate_coprime((0, W))
    assert (right, left) == (True, False)
    assert rk == [] and lk == [0]


def test_shift_vs_coordinate_variants():
    assert shift_vs_coordinate_coprime((0, 12), phi=identity("Z+"))[:2] == (True, True)
    assert shift_vs_coordinate_coprime((0, 12), phi=coordinate("Z+"))[:2] == (False, False)


@pytest.mark.parametrize("name", sorted(EXAMPLES))
def test_window_growth_keeps_verdicts(name):
    fn = EXAMPLES[name]
    W = 12 if name == "shift-coprime" else 8
    a, b = fn(W), fn(W + 4)
    drop = {"window", "escaped", "right_common_kernel", "left_common_kernel"}
    assert {k: v for k, v in a.items() if k not in drop} == {k: v for k, v in b.items() if k not in drop}


def test_overlapping_pieces_rejected():
    with pytest.raises(ValueError):
        ShiftSymbol([Piece(0, 3, 1, 0, 0), Piece(2, None, 1, 0, 0)])


def test_piece_leaving_z_plus_rejected():
    with pytest.raises(ValueError):
        ShiftSymbol([Piece(None, None, 1, -1, 0)], "Z+")


gaussian = st.builds(lambda a, b: sp.Integer(a) + sp.I * b, st.integers(-3, 3), st.integers(-3, 3))


@st.composite
def analytic_symbols(draw):
    c = draw(st.integers(-4, 4))
    return ShiftSymbol([Piece(None, c - 1, draw(st.sampled_from([1, -1])), draw(st.integers(-3, 3)),
                              draw(st.integers(0, 3)), draw(gaussian)),
                        Piece(c, None, 1, draw(st.integers(-3, 3)), draw(st.integers(0, 3)), draw(gaussian))])


@given(st.sampled_from([D, T, identity()]), analytic_symbols())
@settings(max_examples=60, deadline=None)
def test_inner_symbol_left_divides_its_multiples(A, B):
    assert left_divides(A, compose(A, B), (-8, 8))


@given(st.sampled_from([D, T, identity(), shift("Z", 1)]))
def test_adjoint_is_an_involution(A):
    assert tables_equal(adjoint(adjoint(A)), A, (-8, 8))[0]


@given(st.permutations([D, T, shift("Z", 2)]))
@settings(deadline=None)
def test_compose_is_associative(perm):
    a, b, c = perm
    assert tables_equal(compose(compose(a, b), c), compose(a, compose(b, c)), (-8, 8))[0]
