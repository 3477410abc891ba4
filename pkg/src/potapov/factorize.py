"""Blaschke-Potapov factorization of rational inner functions.

The workhorse is :func:`peel_step`: given an inner divisor Delta of
``theta I`` and a zero alpha of theta, it finds the projection P with
``Delta = Delta_next (b_alpha P + I - P)`` where Delta_next divides
``(theta / b_alpha) I``. Peeling every zero of theta leaves a constant
unitary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .blaschke import BPFactor, BPProduct, FiniteBlaschkeProduct, canonicalize, expand
from .errors import CertificationFailure, DivisionResidual, NotADivisor, NotAnalytic, NotInner, NotRational
from .funcspace import (GridSamples, MatPoly, RationalMatFn, _trim, as_rational, cancel_den_zeros, from_grid,
                        grid_log2_for, grid_points, inner_residual, to_grid)
from .numerics import adj, as_tol, fro, is_unitary, range_projection


@dataclass
class PeelStep:
    alpha: complex
    proj: np.ndarray
    division_residual: float
    inner_residual: float
    static_agrees: bool | None = None   # projection from the original theta Delta^* matches


@dataclass
class PeelTrace:
    steps: list = field(default_factory=list)
    final_unitary: np.ndarray | None = None

    def to_json(self):
        from .numerics import cmatrix_to_json, complex_to_json
        return {
            "steps": [{"alpha": complex_to_json(s.alpha), "proj": cmatrix_to_json(s.proj),
                       "division_residual": s.division_residual, "inner_residual": s.inner_residual,
                       "static_agrees": s.static_agrees} for s in self.steps],
            "final_unitary": None if self.final_unitary is None else cmatrix_to_json(self.final_unitary),
        }


def _omega(Delta: RationalMatFn, theta: FiniteBlaschkeProduct, tol) -> RationalMatFn:
    """Analytic ``theta * Delta^*``; its denominator zeros are those of theta."""
    g = grid_log2_for(theta.degree + Delta.degree(), theta.degree + len(Delta.den_zeros))
    z = grid_points(2 ** g)
    S = GridSamples(theta(z)[:, None, None] * adj(Delta(z)))
    try:
        return from_grid(S, theta.degree, theta.zeros, tol)
    except NotAnalytic as exc:
        raise NotADivisor("theta * Delta^* is not analytic", residual=exc.residual) from None
    except CertificationFailure as exc:
        raise NotADivisor("theta * Delta^* has the wrong degree", residual=exc.residual) from None


def _divide_linear(num, alpha):
    """Synthetic division ``num = (z - alpha) q + r`` on a coefficient stack."""
    n = num.shape[0] - 1
    if n == 0:
        return np.zeros((1,) + num.shape[1:], dtype=complex), num[0].copy()
    q = np.zeros((n,) + num.shape[1:], dtype=complex)
    q[n - 1] = num[n]
    for k in range(n - 1, 0, -1):
        q[k - 1] = num[k] + alpha * q[k]
    r = num[0] + alpha * q[0]
    return q, r


def peel_step(Delta, theta_cur: FiniteBlaschkeProduct, alpha, tol=None, check_inner=True):
    """One peel at the zero ``alpha`` of ``theta_cur``.

    Returns ``(BPFactor, Delta_next, theta_next, PeelStep)`` with
    ``Delta = Delta_next @ factor`` on the circle.
    """
    tol = as_tol(tol)
    Delta = as_rational(Delta)
    alpha = complex(alpha)
    if check_inner:
        r = inner_residual(Delta, two_sided=True)
        if r > tol.abs:
            raise NotInner(f"Delta is not two-sided inner (residual {r:.3e})", r)
    theta_next = theta_cur.without(alpha)
    Omega = _omega(Delta, theta_cur, tol)
    P = range_projection(Omega(alpha), tol, scale=1.0)   # Omega is a contraction
    d = P.shape[0]

    N = Delta.numerator.coeffs
    NP = N @ P
    q, rem = _divide_linear(NP, alpha)
    res = fro(rem)
    if res > tol.abs:
        raise DivisionResidual(f"Delta P does not vanish at alpha={alpha} (residual {res:.3e})", res)
    # N (I - P) + q (1 - conj(alpha) z)
    m = max(N.shape[0], q.shape[0] + 1)
    new = np.zeros((m, d, d), dtype=complex)
    new[:N.shape[0]] += N @ (np.eye(d) - P)
    new[:q.shape[0]] += q
    new[1:q.shape[0] + 1] -= np.conj(alpha) * q
    nxt = RationalMatFn(MatPoly(_trim(new, 1e-14)), Delta.den_zeros)
    nxt = cancel_den_zeros(nxt, tol)
    ires = inner_residual(nxt, two_sided=True)
    if check_inner and ires > tol.abs:
        raise NotInner(f"peeled function is not two-sided inner (residual {ires:.3e})", ires)
    return BPFactor(alpha, P), nxt, theta_next, PeelStep(alpha, P, res, ires)


def potapov_peel(Delta, theta: FiniteBlaschkeProduct, tol=None):
    """Factor an inner divisor of ``theta I`` as ``V B_1 ... B_M``.

    Zeros are peeled last to first; the returned factors are in the
    forward order of ``theta.zeros`` with identity factors dropped.
    """
    tol = as_tol(tol)
    Delta = as_rational(Delta)
    if Delta.shape[0] != Delta.shape[1]:
        raise NotInner("Delta is not square")
    r = inner_residual(Delta, two_sided=True)
    if r > tol.abs:
        raise NotInner(f"Delta is not two-sided inner (residual {r:.3e})", r)
    Omega0 = _omega(Delta, theta, tol)

    trace = PeelTrace()
    factors = []
    cur, th = Delta, theta
    for step, alpha in enumerate(reversed(theta.zeros)):
        try:
            f, cur, th, info = peel_step(cur, th, alpha, tol, check_inner=False)
        except (CertificationFailure, NotADivisor) as exc:
            exc.args = (f"step {step} (alpha={alpha}): {exc.args[0]}",) + exc.args[1:]
            raise
        if info.inner_residual > tol.abs:
            raise NotInner(f"step {step}: peeled function is not two-sided inner", info.inner_residual)
        P_static = range_projection(Omega0(alpha), tol, scale=1.0)
        info.static_agrees = bool(fro(P_static - f.proj) <= tol.abs)
        trace.steps.append(info)
        factors.append(f)
    factors.reverse()

    S = to_grid(cur).values
    V = S.mean(axis=0)
    spread = float(np.linalg.norm(S - V, axis=(1, 2)).max())
    if spread > tol.abs:
        raise CertificationFailure(f"remainder after peeling is not constant (spread {spread:.3e})", spread)
    if not is_unitary(V, tol):
        raise NotInner("remainder after peeling is not unitary", fro(adj(V) @ V - np.eye(V.shape[0])))
    # polish to the nearest unitary
    U, _, Wh = np.linalg.svd(V)
    V = U @ Wh
    trace.final_unitary = V
    return canonicalize(BPProduct(V, factors), tol), trace


def inner_rational_to_bp(Phi, tol=None) -> BPProduct:
    """Blaschke-Potapov form of a rational two-sided inner function.

    theta starts from the denominator zeros and gains zeros at the origin
    until ``theta Phi^*`` is analytic.
    """
    tol = as_tol(tol)
    Phi = as_rational(Phi)
    r = inner_residual(Phi, two_sided=True)
    if Phi.shape[0] != Phi.shape[1] or r > tol.abs:
        raise NotInner(f"Phi is not two-sided inner (residual {r:.3e})", r)
    base = [a for a in Phi.den_zeros if a != 0]
    budget = Phi.degree() + len(Phi.den_zeros)
    for k in range(0, budget - len(base) + 1):
        theta = FiniteBlaschkeProduct(base + [0.0] * k)
        try:
            _omega(Phi, theta, tol)
        except NotADivisor:
            continue
        return potapov_peel(Phi, theta, tol)[0]
    raise NotRational(f"no finite Blaschke product of degree <= {budget} makes theta Phi^* analytic")


def coprime_factorize(Phi, tol=None, K=None):
    """``Phi = Delta A^*`` with Delta a Blaschke-Potapov product, A analytic.

    Delta spans ``ker H_{Phi^*}``; ``A = (Delta^* Phi)^*`` is certified analytic
    and the pair ``(Delta~, A~)`` is checked to have no common zero.
    Returns ``(Delta, A)`` with A a RationalMatFn over Delta's denominator.
    """
    from .coprime import bp_coprime_check
    from .hardy import HardyTruncation, blh_extract_stable, hankel_kernel_basis

    tol = as_tol(tol)
    Phi = as_rational(Phi)
    d = Phi.shape[0]
    if K is None:
        K = 2 * (Phi.degree() + len(Phi.den_zeros)) + 4
    trunc = HardyTruncation(d, K, Phi.den_zeros)
    D = blh_extract_stable(lambda tr: hankel_kernel_basis(Phi, tr, tol), trunc, tol)
    if D.shape[1] != d:
        raise CertificationFailure(f"kernel inner function has {D.shape[1]} columns, expected {d}")
    Delta = inner_rational_to_bp(D, tol)
    Dfn = expand(Delta)

    A = _adjoint_product(Dfn, Phi, tol)
    g = max(Phi.grid_log2, A.grid_log2, Dfn.grid_log2) + 1
    res = to_grid(Phi, g).max_dist(GridSamples(to_grid(Dfn, g).values @ adj(to_grid(A, g).values)))
    if res > tol.abs:
        raise CertificationFailure(f"Delta A^* does not reproduce Phi (residual {res:.3e})", res)
    bp_coprime_check(Delta, A, tol, tilde_pair=True)
    return Delta, A


def _adjoint_product(Dfn: RationalMatFn, Phi: RationalMatFn, tol) -> RationalMatFn:
    """``(Delta^* Phi)^* = Phi^* Delta``, certified analytic over Delta's denominator."""
    deg = Dfn.degree()
    g = grid_log2_for(deg + Phi.degree() + len(Phi.den_zeros), len(Dfn.den_zeros) + len(Phi.den_zeros))
    z = grid_points(2 ** g)
    S = GridSamples(adj(Phi(z)) @ Dfn(z))
    return from_grid(S, deg, Dfn.den_zeros, tol)
