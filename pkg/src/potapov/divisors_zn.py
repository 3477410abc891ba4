"""Inner divisors of ``z**N I`` and ``b_alpha**N I``.

When every coefficient of A is a partial isometry and both the ranges and
the co-ranges of the coefficients split E orthogonally, A divides
``z**N I`` and its Blaschke-Potapov form is read off directly: ``P_m``
projects onto the sum of the co-ranges of coefficients m..N and
``V = sum_n A_n``.

The coefficient test is not necessary: products of factors at the origin
with non-commuting projections divide ``z**N I`` but have coefficients that
are not partial isometries. For those, divisibility is checked directly
(A inner and ``z**N A^*`` analytic) and the factors come from peeling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blaschke import BPFactor, BPProduct, FiniteBlaschkeProduct, canonicalize
from .errors import CertificationFailure, NotADivisor
from .funcspace import (GridSamples, MatPoly, RationalMatFn, analytic_part_certify, as_rational, compose_blaschke,
                        grid_log2_for, grid_points, horner, inner_residual, to_grid)
from .numerics import adj, as_tol, fro, is_partial_isometry, is_unitary, orthogonal_decomposition_check, range_projection


@dataclass(frozen=True)
class ZnDivisorCertificate:
    N: int
    alpha: complex
    coeffs: np.ndarray          # A_n in the b_alpha expansion, (N+1, d, d)
    subspace_projs: tuple       # Q_n onto ran A_n^*
    range_projs: tuple          # R_n onto ran A_n
    bp: BPProduct
    residual: float             # grid sup-distance between bp and A
    route: str = "coefficients"   # or "peel" when the coefficient test fails


def classify_zn(A, N, tol=None, alpha=0.0) -> ZnDivisorCertificate:
    """Certify that the polynomial A divides ``z**N I`` and factor it.

    ``alpha`` only relabels the factors (used by :func:`classify_b_alpha_n`);
    the coefficient checks are always those of a polynomial in z.
    """
    tol = as_tol(tol)
    if not isinstance(A, MatPoly):
        A = MatPoly(A)
    d, c = A.shape
    if d != c:
        raise NotADivisor("not square")
    if A.trimmed(1e-14).degree() > N:
        raise NotADivisor("degree exceeds N", A.degree())
    C = A.padded(N)
    try:
        return _coefficient_route(C, N, tol, alpha)
    except NotADivisor as exc:
        if not _divides_zn(C, N, tol):
            raise
        reason = exc
    bp = _peel_route(C, N, tol, alpha)
    res = _reproduction_residual(bp, C, N)
    if res > tol.abs:
        raise NotADivisor("peeled product does not reproduce A", residual=res) from reason
    return ZnDivisorCertificate(N, complex(alpha), C, (), (), bp, res, route="peel")


def _divides_zn(C, N, tol) -> bool:
    """A is two-sided inner and ``z**N A^*`` is analytic (A divides ``z**N I``)."""
    F = RationalMatFn(MatPoly(C))
    if inner_residual(F, two_sided=True) > tol.abs:
        return False
    # z^N A^* on the circle has Fourier support in [0, N] iff it is analytic
    S = GridSamples(grid_points(2 ** grid_log2_for(N))[:, None, None] ** N
                    * adj(to_grid(F, grid_log2_for(N)).values))
    try:
        analytic_part_certify(S, N, tol)
    except CertificationFailure:
        return False
    return True


def _peel_route(C, N, tol, alpha) -> BPProduct:
    from .factorize import potapov_peel
    B, _ = potapov_peel(RationalMatFn(MatPoly(C)), FiniteBlaschkeProduct([0.0] * N), tol)
    return BPProduct(B.unitary, [BPFactor(alpha, f.proj) for f in B.factors])


def _reproduction_residual(bp, C, N) -> float:
    # compare V prod (z P_m + I - P_m) with A on the grid, in the z variable
    d = C.shape[1]
    z = grid_points(2 ** grid_log2_for(N))
    Bz = np.broadcast_to(bp.unitary, z.shape + (d, d)).copy()
    for f in bp.factors:
        Bz = Bz @ BPFactor(0.0, f.proj)(z)
    return float(np.linalg.norm(Bz - horner(C, z), axis=(1, 2)).max())


def _coefficient_route(C, N, tol, alpha) -> ZnDivisorCertificate:
    d = C.shape[1]
    Qs, Rs = [], []
    for n in range(N + 1):
        if not is_partial_isometry(C[n], tol):
            raise NotADivisor("coefficient is not a partial isometry", n, fro(C[n] @ adj(C[n]) @ C[n] - C[n]))
        if not is_partial_isometry(adj(C[n]), tol):
            raise NotADivisor("coefficient adjoint is not a partial isometry", n)
        Qs.append(range_projection(adj(C[n]), tol, scale=1.0))
        Rs.append(range_projection(C[n], tol, scale=1.0))
    if not orthogonal_decomposition_check(Rs, tol):
        raise NotADivisor("ranges do not decompose E orthogonally")
    if not orthogonal_decomposition_check(Qs, tol):
        raise NotADivisor("co-ranges do not decompose E orthogonally")

    V = C.sum(axis=0)
    if not is_unitary(V, tol):
        raise NotADivisor("V is not unitary", residual=fro(adj(V) @ V - np.eye(d)))
    factors = []
    for m in range(1, N + 1):
        P = sum(Qs[m:], np.zeros((d, d), dtype=complex))
        factors.append(BPFactor(alpha, P))
    bp = canonicalize(BPProduct(V, factors), tol)

    res = _reproduction_residual(bp, C, N)
    if res > tol.abs:
        raise NotADivisor("Blaschke-Potapov form does not reproduce A", residual=res)
    return ZnDivisorCertificate(N, complex(alpha), C, tuple(Qs), tuple(Rs), bp, res)


def classify_b_alpha_n(A, alpha, N, tol=None) -> ZnDivisorCertificate:
    """Certify that A divides ``b_alpha**N I``; factors all sit at ``alpha``."""
    tol = as_tol(tol)
    F = as_rational(A)
    shifted = compose_blaschke(F, alpha, degree_bound=N, tol=tol)
    cert = classify_zn(shifted, N, tol, alpha=alpha)
    z = grid_points(2 ** F.grid_log2)
    res = float(np.linalg.norm(cert.bp(z) - F(z), axis=(1, 2)).max())
    if res > tol.abs:
        raise NotADivisor("product does not reproduce A", residual=res)
    return cert


def nontriviality_witness(cert: ZnDivisorCertificate, tol=None):
    """Smallest n >= 1 with a nonzero shifted coefficient, or None for a constant unitary."""
    t = as_tol(tol).abs
    for n in range(1, cert.coeffs.shape[0]):
        if fro(cert.coeffs[n]) > t:
            return n
    return None


def cert_to_json(cert: ZnDivisorCertificate) -> dict:
    from .blaschke import bp_to_json
    from .numerics import cmatrix_to_json, complex_to_json
    return {
        "N": cert.N,
        "alpha": complex_to_json(cert.alpha),
        "subspace_projs": [cmatrix_to_json(Q) for Q in cert.subspace_projs],
        "range_projs": [cmatrix_to_json(R) for R in cert.range_projs],
        "bp": bp_to_json(cert.bp),
        "residual": cert.residual,
        "route": cert.route,
    }
