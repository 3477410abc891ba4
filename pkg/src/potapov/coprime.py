"""Coprimeness of a matrix function with ``theta I``.

At each zero alpha of theta, the left test asks whether ``Phi(alpha)`` is
onto and the right test whether it is one-to-one. A failure produces a
Blaschke-Potapov factor at alpha which is certified to divide Phi.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .blaschke import BPFactor, BPProduct, FiniteBlaschkeProduct, bp_inverse_samples, expand
from .errors import CoprimeCheckFailed, VerdictMismatch
from .funcspace import (GridSamples, _certify_bins, as_rational, den_values, evaluate, fourier_bins, grid_log2_for,
                        to_grid)
from .numerics import as_tol, cmatrix_to_json, complex_to_json, kernel_projection, numerical_rank


@dataclass
class CoprimeWitness:
    alpha: complex
    defect: int
    factor: BPFactor | None
    residual: float | None = None   # largest bin discarded when certifying the division


@dataclass
class CoprimeReport:
    side: str
    verdict: bool
    witnesses: list = field(default_factory=list)

    def __bool__(self):
        return self.verdict

    def to_json(self):
        return {
            "side": self.side,
            "verdict": self.verdict,
            "witnesses": [{"alpha": complex_to_json(w.alpha), "defect": w.defect,
                           "proj": None if w.factor is None else cmatrix_to_json(w.factor.proj),
                           "residual": w.residual} for w in self.witnesses],
        }


def _scale(Phi) -> float:
    return max(1.0, float(np.abs(to_grid(Phi).values).max()))


def _certify(samples: GridSamples, Phi, tol):
    """Largest discarded Fourier bin when reading ``samples`` as analytic over Phi's denominator."""
    deg = Phi.degree() + 1
    num = samples.scale(den_values(Phi.den_zeros, samples.points))
    return _certify_bins(fourier_bins(num), deg, tol, "divisor certificate")


def _grid_for(Phi):
    return grid_log2_for(Phi.degree() + 1, len(Phi.den_zeros)) + 1


def left_coprime_with_theta(Phi, theta: FiniteBlaschkeProduct, tol=None) -> CoprimeReport:
    """Phi and ``theta I`` are left coprime iff ``Phi(alpha)`` is onto at every zero alpha."""
    tol = as_tol(tol)
    Phi = as_rational(Phi)
    rep = CoprimeReport("left", True)
    for a in theta.distinct_zeros():
        C = evaluate(Phi, a)
        P = kernel_projection(C.conj().T, tol, scale=_scale(Phi))
        rank = int(round(np.trace(P).real))
        if rank == 0:
            continue
        f = BPFactor(a, P)
        # B^* Phi must be analytic
        g = _grid_for(Phi)
        res = _certify(bp_inverse_samples(f, g) @ to_grid(Phi, g), Phi, tol)
        rep.verdict = False
        rep.witnesses.append(CoprimeWitness(a, rank, f, res))
    return rep


def right_coprime_with_theta(Phi, theta: FiniteBlaschkeProduct, tol=None) -> CoprimeReport:
    """Phi and ``theta I`` are right coprime iff ``Phi(alpha)`` is one-to-one at every zero alpha."""
    tol = as_tol(tol)
    Phi = as_rational(Phi)
    rep = CoprimeReport("right", True)
    for a in theta.distinct_zeros():
        C = evaluate(Phi, a)
        P = kernel_projection(C, tol, scale=_scale(Phi))
        rank = int(round(np.trace(P).real))
        if rank == 0:
            continue
        f = BPFactor(a, P)
        g = _grid_for(Phi)
        res = _certify(to_grid(Phi, g) @ bp_inverse_samples(f, g), Phi, tol)
        rep.verdict = False
        rep.witnesses.append(CoprimeWitness(a, rank, f, res))
    return rep


def matrix_coprime_equivalence_check(Phi, theta: FiniteBlaschkeProduct, tol=None) -> bool:
    """For square Phi: left coprime, right coprime and invertibility at the zeros all agree."""
    tol = as_tol(tol)
    Phi = as_rational(Phi)
    if Phi.shape[0] != Phi.shape[1]:
        raise ValueError("Phi must be square")
    left = left_coprime_with_theta(Phi, theta, tol).verdict
    right = right_coprime_with_theta(Phi, theta, tol).verdict
    inv = True
    for a in theta.distinct_zeros():
        s = np.linalg.svd(evaluate(Phi, a), compute_uv=False)
        if numerical_rank(s, tol, scale=_scale(Phi)) < Phi.shape[0]:
            inv = False
    if not left == right == inv:
        raise VerdictMismatch(f"left={left}, right={right}, invertible={inv}")
    return inv


def bp_coprime_check(Phi, Psi, tol=None, tilde_pair=False, raise_on_fail=True) -> bool:
    """No common left Blaschke-Potapov factor at the poles of either function or at 0.

    At each candidate alpha the block ``[Phi(alpha) | Psi(alpha)]`` must be onto.
    With ``tilde_pair`` the test is applied to ``(Phi~, Psi~)``, i.e. at the
    conjugate points with adjoint values; that is the right-coprime version.
    Inputs may be BPProducts or anything :func:`as_rational` accepts.
    """
    tol = as_tol(tol)
    F = expand(Phi) if isinstance(Phi, BPProduct) else as_rational(Phi)
    G = expand(Psi) if isinstance(Psi, BPProduct) else as_rational(Psi)
    cands = []
    for a in (0.0,) + F.den_zeros + G.den_zeros:
        a = np.conj(a) if tilde_pair else complex(a)
        if all(abs(a - b) > 1e-12 for b in cands):
            cands.append(a)
    scale = max(_scale(F), _scale(G))
    for a in cands:
        if tilde_pair:
            # Phi~(a) = Phi(conj a)^*
            blk = np.concatenate([evaluate(F, np.conj(a)).conj().T, evaluate(G, np.conj(a)).conj().T], axis=1)
        else:
            blk = np.concatenate([evaluate(F, a), evaluate(G, a)], axis=1)
        s = np.linalg.svd(blk, compute_uv=False)
        defect = blk.shape[0] - numerical_rank(s, tol, scale=scale)
        if defect > 0:
            if raise_on_fail:
                raise CoprimeCheckFailed(a, defect)
            return False
    return True
