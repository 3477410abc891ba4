"""Scalar Blaschke products and Blaschke-Potapov factors and products.

Order convention: a product evaluates as ``V @ B_1(z) @ B_2(z) @ ... @ B_M(z)``.
Factors do not commute, so every API keeps this order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .funcspace import GridSamples, MatPoly, RationalMatFn, grid_log2_for, grid_points, polymul
from .numerics import (as_cmatrix, as_tol, cmatrix_from_json, cmatrix_to_json, complex_from_json,
                       complex_to_json, fro, is_projection, is_unitary)


def blaschke_factor(alpha, z):
    """``b_alpha(z) = (z - alpha) / (1 - conj(alpha) z)``."""
    return (z - alpha) / (1 - np.conj(alpha) * z)


@dataclass(frozen=True)
class FiniteBlaschkeProduct:
    zeros: tuple = ()
    unimodular: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "zeros", tuple(complex(a) for a in self.zeros))
        object.__setattr__(self, "unimodular", complex(self.unimodular))
        if abs(abs(self.unimodular) - 1) > 1e-12:
            raise ValueError("unimodular constant must have modulus one")
        for a in self.zeros:
            if not abs(a) < 1:
                raise ValueError(f"zero {a} outside the open disk")

    @property
    def degree(self) -> int:
        return len(self.zeros)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.unimodular, dtype=complex)
        for a in self.zeros:
            out = out * blaschke_factor(a, z)
        return out

    def distinct_zeros(self, eps=1e-12):
        out = []
        for a in self.zeros:
            if all(abs(a - b) > eps for b in out):
                out.append(a)
        return out

    def without(self, alpha) -> "FiniteBlaschkeProduct":
        """Drop one copy of ``alpha`` (theta / b_alpha)."""
        zs = list(self.zeros)
        i = int(np.argmin([abs(a - alpha) for a in zs]))
        if abs(zs[i] - alpha) > 1e-12:
            raise ValueError(f"{alpha} is not a zero")
        del zs[i]
        return FiniteBlaschkeProduct(zs, self.unimodular)

    def conj(self) -> "FiniteBlaschkeProduct":
        """``theta~``: zeros conjugated (used for the left/right duality)."""
        return FiniteBlaschkeProduct(np.conj(self.zeros), np.conj(self.unimodular))

    def as_function(self, d=1) -> RationalMatFn:
        """``theta * I_d`` as a rational matrix function."""
        num = np.array([self.unimodular])
        for a in self.zeros:
            num = np.convolve(num, [-a, 1.0])
        return RationalMatFn(MatPoly(num[:, None, None] * np.eye(d)[None]), self.zeros)


@dataclass(frozen=True)
class BPFactor:
    """``b_alpha(z) P + (I - P)`` for an orthogonal projection P."""

    alpha: complex
    proj: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        P = as_cmatrix(self.proj)
        if not abs(self.alpha) < 1:
            raise ValueError("alpha must lie in the open disk")
        if not is_projection(P, 1e-8):
            raise ValueError("proj is not an orthogonal projection")
        P = (P + P.conj().T) / 2
        P.setflags(write=False)
        object.__setattr__(self, "proj", P)

    @property
    def dim(self) -> int:
        return self.proj.shape[0]

    def rank(self) -> int:
        return int(round(np.trace(self.proj).real))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        b = blaschke_factor(self.alpha, z)[..., None, None]
        eye = np.eye(self.dim)
        return b * self.proj + (eye - self.proj)

    def numerator(self) -> np.ndarray:
        """Coefficients of ``(z - alpha) P + (1 - conj(alpha) z)(I - P)``; shape (2, d, d)."""
        P, Q = self.proj, np.eye(self.dim) - self.proj
        return np.stack([-self.alpha * P + Q, P - np.conj(self.alpha) * Q])


@dataclass(frozen=True)
class BPProduct:
    unitary: np.ndarray = field(repr=False)
    factors: tuple = ()

    def __post_init__(self):
        V = as_cmatrix(self.unitary)
        if not is_unitary(V, 1e-8):
            raise ValueError("BPProduct.unitary is not unitary")
        V.setflags(write=False)
        object.__setattr__(self, "unitary", V)
        object.__setattr__(self, "factors", tuple(self.factors))
        for f in self.factors:
            if f.dim != V.shape[0]:
                raise ValueError("factor dimension differs from the unitary")

    @property
    def dim(self) -> int:
        return self.unitary.shape[0]

    @property
    def alphas(self):
        return [f.alpha for f in self.factors]

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.broadcast_to(self.unitary, z.shape + self.unitary.shape).copy()
        for f in self.factors:
            out = out @ f(z)
        return out

    def __repr__(self):
        return f"BPProduct(dim={self.dim}, alphas={[complex(round(a.real, 6), round(a.imag, 6)) for a in self.alphas]})"


def bp_eval(B, z) -> np.ndarray:
    return B(z)


def canonicalize(B: BPProduct, tol=None) -> BPProduct:
    """Drop identity factors (zero projections)."""
    t = as_tol(tol).abs
    kept = [f for f in B.factors if fro(f.proj) > t]
    return BPProduct(B.unitary, kept)


def expand(B: BPProduct) -> RationalMatFn:
    """The product as ``numerator / prod (1 - conj(alpha_m) z)``."""
    num = B.unitary[None].astype(complex)
    for f in B.factors:
        num = polymul(num, f.numerator())
    return RationalMatFn(MatPoly(num), B.alphas)


def bp_inverse_samples(B: BPFactor, grid_log2=None) -> GridSamples:
    """Samples of ``P / b_alpha + (I - P)``, which equals ``B(z)^*`` on the circle."""
    if grid_log2 is None:
        grid_log2 = grid_log2_for(1, 1)
    z = grid_points(2 ** grid_log2)
    inv = (1 / blaschke_factor(B.alpha, z))[:, None, None]
    eye = np.eye(B.dim)
    return GridSamples(inv * B.proj + (eye - B.proj))


def factor_grid_log2(B: BPProduct) -> int:
    return grid_log2_for(len(B.factors), len(B.factors))


def bp_to_json(B: BPProduct) -> dict:
    return {
        "unitary": cmatrix_to_json(B.unitary),
        "factors": [{"alpha": complex_to_json(f.alpha), "proj": cmatrix_to_json(f.proj)} for f in B.factors],
    }


def bp_from_json(obj) -> BPProduct:
    try:
        V = cmatrix_from_json(obj["unitary"])
        fs = [BPFactor(complex_from_json(f["alpha"]), cmatrix_from_json(f["proj"])) for f in obj["factors"]]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed BPProduct JSON: {exc}") from None
    return BPProduct(V, fs)


def theta_from_json(obj) -> FiniteBlaschkeProduct:
    """Accepts ``[[re, im], ...]`` or ``{"zeros": [...], "unimodular": [re, im]}``."""
    if isinstance(obj, dict):
        zeros = obj.get("zeros", [])
        nu = complex_from_json(obj.get("unimodular", [1.0, 0.0]))
    else:
        zeros, nu = obj, 1.0
    return FiniteBlaschkeProduct([complex_from_json(a) for a in zeros], nu)


def theta_to_json(theta: FiniteBlaschkeProduct) -> dict:
    return {"zeros": [complex_to_json(a) for a in theta.zeros], "unimodular": complex_to_json(theta.unimodular)}
