"""Exact algebra of monomial shift symbols on l^2(Z) or l^2(Z_+).

A symbol is an operator-valued function ``A(z)`` acting on the standard
basis by ``A(z) e_n = w e_m z^p``. Here ``m = s n + o`` with ``s = +-1``,
and ``(s, o, p, w)`` is constant on each of finitely many index intervals.
Intervals may be unbounded, so composition and adjoints are exact for the
whole infinite-dimensional operator. The index window only selects which
basis vectors a check looks at. Weights are sympy numbers and every
verdict is computed in exact arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import sympy as sp


def _lo_max(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


def _hi_min(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _empty(lo, hi):
    return lo is not None and hi is not None and lo > hi


def _contains(lo, hi, n):
    return (lo is None or n >= lo) and (hi is None or n <= hi)


def _image(lo, hi, s, o):
    """Image of the interval [lo, hi] under n -> s n + o."""
    a = None if lo is None else s * lo + o
    b = None if hi is None else s * hi + o
    return (a, b) if s == 1 else (b, a)


@dataclass(frozen=True)
class Piece:
    lo: int | None
    hi: int | None
    sign: int
    offset: int
    power: int
    weight: sp.Expr = sp.Integer(1)

    def target(self, n):
        return self.sign * n + self.offset


@dataclass(frozen=True)
class ShiftSymbol:
    pieces: tuple
    domain: str = "Z"       # "Z" or "Z+"
    name: str = ""

    def __post_init__(self):
        if self.domain not in ("Z", "Z+"):
            raise ValueError("domain must be 'Z' or 'Z+'")
        object.__setattr__(self, "pieces", tuple(self.pieces))
        floor = 0 if self.domain == "Z+" else None
        for i, p in enumerate(self.pieces):
            if p.sign not in (1, -1):
                raise ValueError("piece sign must be +1 or -1")
            for q in self.pieces[i + 1:]:
                if not _empty(_lo_max(p.lo, q.lo), _hi_min(p.hi, q.hi)):
                    raise ValueError("pieces overlap")
            if floor is not None:
                lo, hi = _image(_lo_max(p.lo, 0), p.hi, p.sign, p.offset)
                if lo is None or lo < 0:
                    raise ValueError("piece maps outside Z_+")

    def piece_at(self, n):
        if self.domain == "Z+" and n < 0:
            return None
        for p in self.pieces:
            if _contains(p.lo, p.hi, n):
                return p
        return None

    def apply(self, n):
        """``(m, power, weight)`` with ``A(z) e_n = weight e_m z^power``, or None if A(z) e_n = 0."""
        p = self.piece_at(n)
        if p is None or p.weight == 0:
            return None
        return p.target(n), p.power, p.weight

    def __matmul__(self, other):
        return compose(self, other)


def _clip(sym_domain, lo, hi):
    if sym_domain == "Z+":
        lo = _lo_max(lo, 0)
    return lo, hi


def compose(A: ShiftSymbol, B: ShiftSymbol) -> ShiftSymbol:
    """The pointwise product ``A(z) B(z)``."""
    if A.domain != B.domain:
        raise ValueError("symbols act on different spaces")
    out = []
    for pb in B.pieces:
        blo, bhi = _clip(B.domain, pb.lo, pb.hi)
        for pa in A.pieces:
            # n with s_b n + o_b in [pa.lo, pa.hi]
            plo, phi = _image(pa.lo, pa.hi, pb.sign, -pb.sign * pb.offset)
            lo, hi = _lo_max(blo, plo), _hi_min(bhi, phi)
            if _empty(lo, hi):
                continue
            out.append(Piece(lo, hi, pa.sign * pb.sign, pa.sign * pb.offset + pa.offset,
                             pa.power + pb.power, sp.expand(pa.weight * pb.weight)))
    return ShiftSymbol(out, A.domain)


def adjoint(A: ShiftSymbol) -> ShiftSymbol:
    """``A(z)^*`` on the circle: ``e_m -> conj(w) e_n z^-p`` (needs an injective index map)."""
    out = []
    for p in A.pieces:
        lo, hi = _clip(A.domain, p.lo, p.hi)
        ilo, ihi = _image(lo, hi, p.sign, p.offset)
        out.append(Piece(ilo, ihi, p.sign, -p.sign * p.offset, -p.power, sp.conjugate(p.weight)))
    return ShiftSymbol(out, A.domain)


def identity(domain="Z") -> ShiftSymbol:
    return ShiftSymbol([Piece(None, None, 1, 0, 0)], domain, "I")


def shift(domain="Z+", power=0) -> ShiftSymbol:
    """``S z^power`` with ``S e_n = e_{n+1}``."""
    return ShiftSymbol([Piece(None, None, 1, 1, power)], domain, f"S z^{power}")


def coordinate(domain="Z+") -> ShiftSymbol:
    """``z I``."""
    return ShiftSymbol([Piece(None, None, 1, 0, 1)], domain, "zI")


# -- window checks -----------------------------------------------------------

@dataclass
class RuleTable:
    """Images of the window's basis vectors; ``escaped`` lists indices mapped outside."""
    rows: dict
    escaped: list = field(default_factory=list)


def window_indices(window, domain):
    lo, hi = window
    if domain == "Z+":
        lo = max(lo, 0)
    return range(lo, hi + 1)


def rule_table(A: ShiftSymbol, window) -> RuleTable:
    rows, escaped = {}, []
    for n in window_indices(window, A.domain):
        r = A.apply(n)
        rows[n] = r
        if r is not None and not window[0] <= r[0] <= window[1]:
            escaped.append(n)
    return RuleTable(rows, escaped)


def tables_equal(A: ShiftSymbol, B: ShiftSymbol, window) -> tuple:
    """``(equal, first differing index)`` on non-escaped window indices."""
    ta, tb = rule_table(A, window), rule_table(B, window)
    skip = set(ta.escaped) | set(tb.escaped)
    for n in ta.rows:
        if n in skip:
            continue
        ra, rb = ta.rows[n], tb.rows[n]
        if (ra is None) != (rb is None):
            return False, n
        if ra is not None and (ra[0] != rb[0] or ra[1] != rb[1] or sp.simplify(ra[2] - rb[2]) != 0):
            return False, n
    return True, None


def min_power(A: ShiftSymbol):
    ps = [p.power for p in A.pieces if p.weight != 0]
    return min(ps) if ps else 0


def is_analytic(A: ShiftSymbol) -> bool:
    """All powers nonnegative, over the whole (infinite) index set."""
    return min_power(A) >= 0


def analytic_witness(A: ShiftSymbol, window):
    """Smallest window index n whose image carries a negative power, as ``(n, m, power)``."""
    for n in window_indices(window, A.domain):
        r = A.apply(n)
        if r is not None and r[1] < 0:
            return n, r[0], r[1]
    return None


def _covers(intervals, domain) -> bool:
    """Do the disjoint intervals cover Z (or Z_+) exactly?"""
    floor = 0 if domain == "Z+" else None
    ivs = []
    for lo, hi in intervals:
        lo = _lo_max(lo, floor) if floor is not None else lo
        if not _empty(lo, hi):
            ivs.append((lo, hi))
    ivs.sort(key=lambda t: float("-inf") if t[0] is None else t[0])
    expect = floor
    for i, (lo, hi) in enumerate(ivs):
        if i == 0 and lo != expect:
            return False
        if i > 0:
            if expect is None or lo != expect + 1:
                return False
        if hi is None:
            return i == len(ivs) - 1
        expect = hi
    return False


def is_two_sided_inner_symbolic(A: ShiftSymbol) -> bool:
    """Index map is a bijection of the index set and every weight is unimodular."""
    if any(sp.simplify(p.weight * sp.conjugate(p.weight) - 1) != 0 for p in A.pieces):
        return False
    doms = [_clip(A.domain, p.lo, p.hi) for p in A.pieces]
    imgs = [_image(lo, hi, p.sign, p.offset) for (lo, hi), p in zip(doms, A.pieces)]
    for i, (a, b) in enumerate(imgs):
        for c, d in imgs[i + 1:]:
            if not _empty(_lo_max(a, c), _hi_min(b, d)):
                return False
    return _covers(doms, A.domain) and _covers(imgs, A.domain)


def left_divides(D: ShiftSymbol, T: ShiftSymbol, window) -> bool:
    """``T = D Q`` with Q analytic: ``Q = D^* T`` must be analytic and reproduce T."""
    Q = compose(adjoint(D), T)
    return is_analytic(Q) and tables_equal(compose(D, Q), T, window)[0]


def right_divides(D: ShiftSymbol, T: ShiftSymbol, window) -> bool:
    """``T = Q D`` with Q analytic: ``Q = T D^*`` must be analytic and reproduce T."""
    Q = compose(T, adjoint(D))
    return is_analytic(Q) and tables_equal(compose(Q, D), T, window)[0]


# -- Toeplitz compressions ---------------------------------------------------

def _apply_vec(A: ShiftSymbol, f: dict) -> dict:
    """``P_+(A f)`` for ``f = {(j, k): c}`` meaning ``sum c e_j z^k``."""
    out = {}
    for (j, k), c in f.items():
        r = A.apply(j)
        if r is None:
            continue
        m, p, w = r
        if k + p < 0:
            continue
        key = (m, k + p)
        out[key] = sp.expand(out.get(key, 0) + w * c)
    return {k: v for k, v in out.items() if v != 0}


def toeplitz_apply(A: ShiftSymbol, f: dict) -> dict:
    return _apply_vec(A, f)


def _inner(u: dict, v: dict):
    return sp.expand(sum((c * sp.conjugate(v[k]) for k, c in u.items() if k in v), sp.Integer(0)))


def toeplitz_bracket(A: ShiftSymbol, f: dict):
    """``<(T_{A^*} T_A - T_A T_{A^*}) f, f>`` exactly."""
    As = adjoint(A)
    u = _apply_vec(As, _apply_vec(A, f))
    v = _apply_vec(A, _apply_vec(As, f))
    return sp.simplify(_inner(u, f) - _inner(v, f))


@dataclass
class QuasinormalReport:
    isometric: bool                 # T_A^* T_A = I on the window
    failing_index: tuple | None     # first (j, k) where it fails
    non_normal_witness: int | None  # smallest n with A A^* e_n != A^* A e_n

    def __bool__(self):
        return self.isometric


def quasinormal_check(A: ShiftSymbol, window, zdeg=None) -> QuasinormalReport:
    """``T_A^* T_A = I`` on ``e_j z^k`` (j in window, 0 <= k <= zdeg), plus a non-normality witness.

    An isometric Toeplitz operator is quasinormal since it commutes with
    ``T^* T = I``.
    """
    zdeg = (window[1] - window[0]) if zdeg is None else zdeg
    As = adjoint(A)
    fail = None
    for j in window_indices(window, A.domain):
        for k in range(zdeg + 1):
            img = _apply_vec(As, _apply_vec(A, {(j, k): sp.Integer(1)}))
            if img != {(j, k): 1}:
                fail = (j, k)
                break
        if fail:
            break
    same, n = tables_equal(compose(A, As), compose(As, A), window)
    return QuasinormalReport(fail is None, fail, None if same else n)


# -- coprimeness at the origin ---------------------------------------------

def _value_at_zero(A: ShiftSymbol) -> ShiftSymbol:
    if not is_analytic(A):
        raise ValueError("symbol is not analytic")
    return ShiftSymbol([p for p in A.pieces if p.power == 0], A.domain)


def _joint_kernel(ops, window):
    """Window indices n with every op killing e_n (ops are monomial and injective)."""
    return [n for n in window_indices(window, ops[0].domain) if all(op.apply(n) is None for op in ops)]


def shift_vs_coordinate_coprime(window, phi: ShiftSymbol | None = None, psi: ShiftSymbol | None = None):
    """Right/left coprimeness of ``(phi, psi)`` at the origin, default ``(S, zI)`` on Z_+.

    Right: the values at 0 have no common kernel vector. Left: their adjoints
    have none, i.e. the ranges together span. Returns
    ``(right, left, right_kernel, left_kernel)``.
    """
    phi = shift("Z+") if phi is None else phi
    psi = coordinate("Z+") if psi is None else psi
    P0, Q0 = _value_at_zero(phi), _value_at_zero(psi)
    rk = _joint_kernel([P0, Q0], window)
    lk = _joint_kernel([adjoint(P0), adjoint(Q0)], window)
    return not rk, not lk, rk, lk


# -- named examples ----------------------------------------------------------

def example_1_3_delta() -> ShiftSymbol:
    """``e_n -> e_{n+1} z`` for n >= 0, ``e_n -> e_{n+1}`` for n < 0."""
    return ShiftSymbol([Piece(0, None, 1, 1, 1), Piece(None, -1, 1, 1, 0)], "Z", "Delta")


def example_1_3_theta() -> ShiftSymbol:
    """``e_n -> e_{1-n} z^2`` for n <= 1, ``e_n -> e_{1-n}`` for n > 1."""
    return ShiftSymbol([Piece(None, 1, -1, 1, 2), Piece(2, None, -1, 1, 0)], "Z", "Theta")


def example_1_3(W=8) -> dict:
    window = (-W, W)
    D, T = example_1_3_delta(), example_1_3_theta()
    TDs = compose(T, adjoint(D))
    wit = analytic_witness(TDs, window)
    escaped = rule_table(TDs, window).escaped
    return {
        "example": "1.3",
        "window": list(window),
        "delta_two_sided_inner": is_two_sided_inner_symbolic(D),
        "theta_two_sided_inner": is_two_sided_inner_symbolic(T),
        "left_divides": left_divides(D, T, window),
        "right_divides": right_divides(D, T, window),
        "witness": None if wit is None else {"index": wit[0], "target": wit[1], "power": wit[2]},
        "witness_escaped": wit is not None and wit[0] in escaped,
        "escaped": escaped,
    }


def example_1_4(W=8) -> dict:
    window = (0, W)
    S, I = shift("Z+"), identity("Z+")
    return {
        "example": "1.4",
        "window": list(window),
        "left_divides": left_divides(S, I, window),
        "right_divides": right_divides(S, I, window),
    }


def example_5_1(W=8, powers=(0, 1, 2)) -> dict:
    window = (0, W)
    out = {"example": "5.1", "window": list(window), "cases": []}
    for n in powers:
        rep = quasinormal_check(shift("Z+", n), window)
        out["cases"].append({"n": n, "isometric": rep.isometric, "non_normal_witness": rep.non_normal_witness})
    out["verdict"] = all(c["isometric"] and c["non_normal_witness"] is not None for c in out["cases"])
    return out


def example_5_2(W=8) -> dict:
    Sstar = adjoint(shift("Z+"))
    val = toeplitz_bracket(Sstar, {(0, 1): sp.Integer(1)})
    return {"example": "5.2", "window": [0, W], "bracket": str(val), "negative": bool(val < 0)}


def example_shift_coprime(W=12) -> dict:
    right, left, rk, lk = shift_vs_coordinate_coprime((0, W))
    return {"example": "shift-coprime", "window": [0, W], "right_coprime": right, "left_coprime": left,
            "right_common_kernel": rk, "left_common_kernel": lk}


EXAMPLES = {
    "1.3": example_1_3,
    "1.4": example_1_4,
    "5.1": example_5_1,
    "5.2": example_5_2,
    "shift-coprime": example_shift_coprime,
}
