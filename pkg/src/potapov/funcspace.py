"""Bounded analytic matrix functions on the disk.

A function is stored as a matrix polynomial numerator over the scalar
denominator ``q(z) = prod_k (1 - conj(a_k) z)`` with every ``|a_k| < 1``.
Boundary behaviour is handled on the grid ``z_k = exp(2 pi i k / G)``,
``G = 2**grid_log2``; the FFT moves between coefficients and samples, and
every transform back to coefficients certifies that the discarded bins are
below tolerance.
"""

from __future__ import annotations

import numpy as np

from .errors import CertificationFailure, NotAnalytic
from .numerics import adj, as_cmatrix, as_tol, cmatrix_from_json, cmatrix_to_json, complex_from_json, complex_to_json

OVERSAMPLE = 4


def grid_log2_for(degree, n_den=0) -> int:
    """Smallest g with 2**g >= OVERSAMPLE * (degree + n_den + 1)."""
    need = OVERSAMPLE * (int(degree) + int(n_den) + 1)
    return max(2, int(np.ceil(np.log2(need))))


def grid_points(G) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(G) / G)


def _trim(coeffs, eps=0.0):
    norms = np.linalg.norm(coeffs, axis=(1, 2))
    scale = max(1.0, float(norms.max(initial=0.0)))
    keep = len(norms)
    while keep > 1 and norms[keep - 1] <= eps * scale:
        keep -= 1
    return coeffs[:keep]


def polymul(a, b) -> np.ndarray:
    """Product of matrix polynomials given as (n, r, m) and (p, m, c) arrays."""
    if a.shape[2] != b.shape[1]:
        raise ValueError(f"inner dimensions differ: {a.shape} @ {b.shape}")
    out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1], b.shape[2]), dtype=complex)
    for i in range(a.shape[0]):
        out[i:i + b.shape[0]] += np.einsum("rm,kmc->krc", a[i], b)
    return out


def horner(coeffs, z) -> np.ndarray:
    """Evaluate a coefficient stack at scalar or array ``z``; result (..., r, c)."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape + coeffs.shape[1:], dtype=complex)
    for C in coeffs[::-1]:
        out = out * z[..., None, None] + C
    return out


def den_values(den_zeros, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    q = np.ones_like(z)
    for a in den_zeros:
        q = q * (1 - np.conj(a) * z)
    return q


def den_coeffs(den_zeros) -> np.ndarray:
    q = np.array([1.0 + 0j])
    for a in den_zeros:
        q = np.convolve(q, [1.0, -np.conj(a)])
    return q


class MatPoly:
    """Matrix polynomial ``sum_n coeffs[n] z**n``; coefficients stacked as (N+1, r, c)."""

    def __init__(self, coeffs):
        arr = np.asarray(coeffs, dtype=complex)
        if arr.ndim == 2:
            arr = arr[None]
        if arr.ndim != 3 or arr.shape[0] == 0:
            raise ValueError("MatPoly needs a nonempty stack of equally shaped matrices")
        if not np.all(np.isfinite(arr)):
            raise ValueError("MatPoly has non-finite coefficients")
        arr = arr.copy()
        arr.setflags(write=False)
        self.coeffs = arr

    @classmethod
    def constant(cls, A):
        return cls(as_cmatrix(A)[None])

    @classmethod
    def monomial(cls, A, n):
        A = as_cmatrix(A)
        c = np.zeros((n + 1,) + A.shape, dtype=complex)
        c[n] = A
        return cls(c)

    @property
    def shape(self):
        return self.coeffs.shape[1:]

    def degree(self) -> int:
        nz = np.flatnonzero(np.linalg.norm(self.coeffs, axis=(1, 2)) > 0)
        return int(nz[-1]) if nz.size else 0

    def trimmed(self, eps=0.0) -> "MatPoly":
        return MatPoly(_trim(self.coeffs, eps))

    def padded(self, n) -> np.ndarray:
        """Coefficient stack padded with zeros (or cut) to length n + 1."""
        out = np.zeros((n + 1,) + self.shape, dtype=complex)
        m = min(n + 1, self.coeffs.shape[0])
        out[:m] = self.coeffs[:m]
        return out

    def __call__(self, z):
        return horner(self.coeffs, z)

    def __repr__(self):
        return f"MatPoly(degree={self.degree()}, shape={self.shape})"


class RationalMatFn:
    """``numerator(z) / prod_k (1 - conj(den_zeros[k]) z)``."""

    def __init__(self, numerator, den_zeros=(), grid_log2=None):
        if not isinstance(numerator, MatPoly):
            numerator = MatPoly(numerator)
        zeros = tuple(complex(a) for a in den_zeros)
        for a in zeros:
            if not abs(a) < 1:
                raise ValueError(f"denominator zero {a} is not inside the unit disk")
        need = grid_log2_for(numerator.degree(), len(zeros))
        if grid_log2 is None:
            grid_log2 = need
        elif grid_log2 < need:
            raise ValueError(f"grid_log2={grid_log2} too small, need >= {need}")
        self.numerator = numerator
        self.den_zeros = zeros
        self.grid_log2 = int(grid_log2)

    @property
    def shape(self):
        return self.numerator.shape

    @property
    def G(self) -> int:
        return 2 ** self.grid_log2

    def degree(self) -> int:
        return self.numerator.degree()

    def __call__(self, z):
        return self.numerator(z) / den_values(self.den_zeros, z)[..., None, None]

    def with_grid(self, grid_log2) -> "RationalMatFn":
        return RationalMatFn(self.numerator, self.den_zeros, grid_log2)

    def __repr__(self):
        return (f"RationalMatFn(degree={self.degree()}, shape={self.shape}, "
                f"den_zeros={len(self.den_zeros)}, G={self.G})")


class GridSamples:
    """Values at ``z_k = exp(2 pi i k / G)`` stacked as (G, r, c)."""

    def __init__(self, values):
        v = np.asarray(values, dtype=complex)
        G = v.shape[0]
        if v.ndim != 3 or G < 1 or G & (G - 1):
            raise ValueError("GridSamples needs a (G, r, c) stack with G a power of two")
        self.values = v

    @property
    def G(self) -> int:
        return self.values.shape[0]

    @property
    def grid_log2(self) -> int:
        return int(np.log2(self.G))

    @property
    def points(self):
        return grid_points(self.G)

    @classmethod
    def of(cls, fn, G):
        """Sample any callable (vectorised over z) on the G-point grid."""
        return cls(fn(grid_points(G)))

    def __matmul__(self, other):
        if isinstance(other, GridSamples):
            if other.G != self.G:
                raise ValueError("grid size mismatch")
            return GridSamples(self.values @ other.values)
        return GridSamples(self.values @ np.asarray(other))

    def __rmatmul__(self, other):
        return GridSamples(np.asarray(other) @ self.values)

    def scale(self, s) -> "GridSamples":
        """Multiply sample k by the scalar s[k]."""
        return GridSamples(self.values * np.asarray(s)[:, None, None])

    def adjoint(self) -> "GridSamples":
        return GridSamples(adj(self.values))

    def max_dist(self, other) -> float:
        return float(np.max(np.linalg.norm(self.values - other.values, axis=(1, 2))))


def as_rational(F) -> RationalMatFn:
    if isinstance(F, RationalMatFn):
        return F
    if isinstance(F, MatPoly):
        return RationalMatFn(F)
    return RationalMatFn(MatPoly.constant(F))


def evaluate(F, z) -> np.ndarray:
    """Value at a point of the closed disk (Taylor/Poisson extension inside)."""
    F = as_rational(F)
    z = complex(z)
    if abs(z) > 1 + 1e-12:
        raise ValueError(f"|z| = {abs(z)} > 1: outside the closed disk")
    return F(z)


def to_grid(F, grid_log2=None) -> GridSamples:
    F = as_rational(F)
    g = F.grid_log2 if grid_log2 is None else grid_log2
    G = 2 ** g
    n = F.numerator.coeffs.shape[0]
    if n > G:
        raise ValueError("grid too small for numerator degree")
    pad = np.zeros((G,) + F.shape, dtype=complex)
    pad[:n] = F.numerator.coeffs
    num = G * np.fft.ifft(pad, axis=0)
    return GridSamples(num / den_values(F.den_zeros, grid_points(G))[:, None, None])


def fourier_bins(S: GridSamples) -> np.ndarray:
    """Fourier coefficients; index k >= G/2 holds frequency k - G."""
    return np.fft.fft(S.values, axis=0) / S.G


def _certify_bins(bins, degree_bound, tol, what):
    G = bins.shape[0]
    norms = np.linalg.norm(bins, axis=(1, 2))
    neg = float(norms[G // 2:].max(initial=0.0))
    if neg > tol.abs:
        raise NotAnalytic(f"{what}: negative-frequency bin of norm {neg:.3e}", neg)
    tail = float(norms[degree_bound + 1:G // 2].max(initial=0.0))
    if tail > tol.abs:
        raise CertificationFailure(f"{what}: coefficient beyond degree {degree_bound} of norm {tail:.3e}", tail)
    return max(neg, tail)


def from_grid(S: GridSamples, degree_bound, den_zeros=(), tol=None, recheck=None) -> RationalMatFn:
    """Recover ``numerator / q`` from boundary samples, certifying the fit.

    Samples are multiplied by ``q(z_k)`` and inverse transformed; every bin
    above ``degree_bound`` (including the aliased negative frequencies) must
    be below ``tol.abs``. ``recheck`` is an optional callable returning the
    same samples on a doubled grid; the certificate must survive it.
    """
    tol = as_tol(tol)
    den_zeros = tuple(complex(a) for a in den_zeros)
    if S.G < OVERSAMPLE * (degree_bound + len(den_zeros) + 1):
        raise ValueError(f"grid of {S.G} points too small for degree {degree_bound} "
                         f"with {len(den_zeros)} denominator zeros")
    num = S.scale(den_values(den_zeros, S.points))
    bins = fourier_bins(num)
    _certify_bins(bins, degree_bound, tol, "from_grid")
    if recheck is not None:
        from_grid(recheck(), degree_bound, den_zeros, tol)
    coeffs = _trim(bins[:degree_bound + 1], 1e-13)
    return RationalMatFn(MatPoly(coeffs), den_zeros, max(S.grid_log2, grid_log2_for(coeffs.shape[0] - 1, len(den_zeros))))


def analytic_part_certify(S: GridSamples, degree_bound, tol=None) -> MatPoly:
    """Nonnegative Fourier part of polynomial boundary data, certified analytic.

    Raises NotAnalytic when any negative-frequency bin exceeds ``tol.abs``.
    """
    tol = as_tol(tol)
    if S.G < OVERSAMPLE * (degree_bound + 1):
        raise ValueError(f"grid of {S.G} points too small for degree {degree_bound}")
    bins = fourier_bins(S)
    _certify_bins(bins, degree_bound, tol, "analytic_part_certify")
    return MatPoly(_trim(bins[:degree_bound + 1], 1e-13))


def multiply(F, G) -> RationalMatFn:
    """Pointwise product, recovered from grid samples."""
    F, G = as_rational(F), as_rational(G)
    if F.shape[1] != G.shape[0]:
        raise ValueError(f"shape mismatch {F.shape} @ {G.shape}")
    den = F.den_zeros + G.den_zeros
    deg = F.degree() + G.degree()
    g = max(F.grid_log2, G.grid_log2, grid_log2_for(deg, len(den)))
    S = to_grid(F, g) @ to_grid(G, g)
    return from_grid(S, deg, den, tol=1e-9)


def tilde(F) -> RationalMatFn:
    """``F~(z) = F(conj z)^*``: conjugate-transposed coefficients, conjugated zeros."""
    F = as_rational(F)
    return RationalMatFn(MatPoly(adj(F.numerator.coeffs)), tuple(np.conj(a) for a in F.den_zeros), F.grid_log2)


def adjoint_on_circle(F, grid_log2=None) -> GridSamples:
    return to_grid(F, grid_log2).adjoint()


def cancel_den_zeros(F, tol=None) -> RationalMatFn:
    """Remove denominator factors that divide the numerator.

    Division by ``1 - conj(a) z`` runs from the constant term upward
    (stable for |a| < 1); the top-degree remainder is the certificate.
    """
    F = as_rational(F)
    tol = as_tol(tol)
    num = F.numerator.coeffs
    kept = []
    for a in F.den_zeros:
        if a == 0:
            continue
        n = num.shape[0] - 1
        if n == 0:
            kept.append(a)
            continue
        ca = np.conj(a)
        q = np.zeros((n,) + num.shape[1:], dtype=complex)
        q[0] = num[0]
        for k in range(1, n):
            q[k] = num[k] + ca * q[k - 1]
        rem = num[n] + ca * q[n - 1]
        if np.linalg.norm(rem) <= tol.abs:
            num = _trim(q, 1e-13)
        else:
            kept.append(a)
    return RationalMatFn(MatPoly(num), kept, max(F.grid_log2, grid_log2_for(num.shape[0] - 1, len(kept))))


def blaschke_inverse(w, alpha):
    """``b_{-alpha}(w) = (w + alpha) / (1 + conj(alpha) w)``, the inverse map of b_alpha."""
    return (w + alpha) / (1 + np.conj(alpha) * w)


def compose_blaschke(F, alpha, degree_bound=None, tol=None) -> MatPoly:
    """Coefficients ``A_n`` with ``F = sum_n A_n b_alpha**n``.

    Samples ``F(b_{-alpha}(w))`` on the circle and transforms; raises
    CertificationFailure when F is not a polynomial in b_alpha of the
    stated degree.
    """
    F = as_rational(F)
    tol = as_tol(tol)
    if degree_bound is None:
        degree_bound = max(F.degree(), len(F.den_zeros))
    g = grid_log2_for(degree_bound)
    w = grid_points(2 ** g)
    S = GridSamples(F(blaschke_inverse(w, complex(alpha))))
    return analytic_part_certify(S, degree_bound, tol)


def shift_back(A: MatPoly, alpha) -> RationalMatFn:
    """Rebuild ``sum_n A_n b_alpha(z)**n`` as a rational function."""
    alpha = complex(alpha)
    N = A.coeffs.shape[0] - 1
    r, c = A.shape
    num = np.zeros((N + 1, r, c), dtype=complex)
    lin = np.array([-alpha, 1.0])
    den = np.array([1.0, -np.conj(alpha)])
    for n in range(N + 1):
        p = np.array([1.0 + 0j])
        for _ in range(n):
            p = np.convolve(p, lin)
        for _ in range(N - n):
            p = np.convolve(p, den)
        num += p[:, None, None] * A.coeffs[n][None]
    return RationalMatFn(MatPoly(num), [alpha] * N)


def inner_residual(F, grid_log2=None, two_sided=False) -> float:
    S = to_grid(F, grid_log2).values
    r, c = S.shape[1:]
    res = np.linalg.norm(adj(S) @ S - np.eye(c), axis=(1, 2)).max()
    if two_sided:
        res = max(res, np.linalg.norm(S @ adj(S) - np.eye(r), axis=(1, 2)).max())
    return float(res)


def is_inner(F, tol=None, recheck=False) -> bool:
    F = as_rational(F)
    ok = inner_residual(F) <= as_tol(tol).abs
    if ok and recheck:
        ok = inner_residual(F, F.grid_log2 + 1) <= as_tol(tol).abs
    return ok


def is_two_sided_inner(F, tol=None, recheck=False) -> bool:
    F = as_rational(F)
    if F.shape[0] != F.shape[1]:
        return False
    ok = inner_residual(F, two_sided=True) <= as_tol(tol).abs
    if ok and recheck:
        ok = inner_residual(F, F.grid_log2 + 1, two_sided=True) <= as_tol(tol).abs
    return ok


def sup_distance(F, G, grid_log2=None) -> float:
    """Max over grid nodes of the Frobenius distance between two functions."""
    F, G = as_rational(F), as_rational(G)
    g = grid_log2 or max(F.grid_log2, G.grid_log2)
    return to_grid(F, g).max_dist(to_grid(G, g))


def fn_to_json(F) -> dict:
    F = as_rational(F)
    return {
        "coeffs": [cmatrix_to_json(C) for C in F.numerator.coeffs],
        "den_zeros": [complex_to_json(a) for a in F.den_zeros],
        "grid_log2": F.grid_log2,
    }


def fn_from_json(obj) -> RationalMatFn:
    try:
        coeffs = [cmatrix_from_json(c) for c in obj["coeffs"]]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed function JSON: {exc}") from None
    if not coeffs:
        raise ValueError("function JSON has no coefficients")
    if len({c.shape for c in coeffs}) != 1:
        raise ValueError("coefficients have differing shapes")
    den = [complex_from_json(a) for a in obj.get("den_zeros", [])]
    return RationalMatFn(MatPoly(np.stack(coeffs)), den, obj.get("grid_log2"))
