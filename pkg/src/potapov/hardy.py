"""Truncated Hankel/Toeplitz operators on vector-valued H^2 and inner extraction.

A :class:`HardyTruncation` is the space of ``p(z) / q_w(z)`` with ``p`` a
C^d-valued polynomial of degree < K and ``q_w = prod (1 - conj(b) z)`` over
the weight zeros. Vectors store the coefficients of ``p`` as
``v[j*d + i]``. With weights equal to the poles of the symbol, kernels of
Hankel operators and their wandering subspaces are represented exactly,
not just approximated, once K exceeds their degree. The price is a
non-identity Gram matrix, the block Toeplitz matrix of ``1 / |q_w|^2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CertificationFailure, NotInner, NotShiftInvariant, TrivialGcd, TruncationTooSmall
from .funcspace import (GridSamples, _trim, MatPoly, RationalMatFn, as_rational, cancel_den_zeros, den_values, from_grid, grid_log2_for, grid_points, inner_residual, tilde, to_grid)
from .numerics import adj, as_tol, fro, kernel_basis, orth_complement, range_basis

_TAIL_EPS = 1e-18


def _tail(rho) -> int:
    """Number of terms after which ``rho**n`` is below double precision noise."""
    if rho <= 0:
        return 0
    return int(np.ceil(np.log(_TAIL_EPS) / np.log(rho)))


def _pow2_at_least(n) -> int:
    return 1 << max(2, int(np.ceil(np.log2(max(n, 4)))))


@dataclass(frozen=True)
class HardyTruncation:
    d: int
    K: int
    den_zeros: tuple = ()

    def __post_init__(self):
        if self.d < 1 or self.K < 1:
            raise ValueError("HardyTruncation needs d >= 1 and K >= 1")
        object.__setattr__(self, "den_zeros", tuple(complex(a) for a in self.den_zeros))

    @property
    def dim(self) -> int:
        return self.d * self.K

    def grown(self, by=2) -> "HardyTruncation":
        return HardyTruncation(self.d, self.K + by, self.den_zeros)

    def gram(self) -> np.ndarray:
        """Gram matrix of the basis ``z^j e_i / q_w``."""
        if not self.den_zeros:
            return np.eye(self.dim, dtype=complex)
        rho = max(abs(a) for a in self.den_zeros)
        G = _pow2_at_least(4 * (self.K + _tail(rho)))
        z = grid_points(G)
        c = np.fft.fft(1.0 / np.abs(den_values(self.den_zeros, z)) ** 2) / G
        j = np.arange(self.K)
        T = c[(j[:, None] - j[None, :]) % G]           # <u, v> = v^H T u with T[j, k] = w^(j - k)
        return np.kron(T, np.eye(self.d))

    def to_function(self, V) -> RationalMatFn:
        """Read the columns of V as the columns of a d x m function."""
        V = np.asarray(V, dtype=complex)
        m = V.shape[1]
        coeffs = V.reshape(self.K, self.d, m)
        return RationalMatFn(MatPoly(_trim(coeffs, 1e-12)), self.den_zeros)

    def from_polys(self, polys) -> np.ndarray:
        """Stack (n, d, m) numerator coefficients (degree < K) into vectors."""
        polys = np.asarray(polys, dtype=complex)
        if polys.shape[0] > self.K:
            if np.linalg.norm(polys[self.K:]) > 0:
                raise ValueError("numerator degree exceeds the truncation")
            polys = polys[:self.K]
        out = np.zeros((self.K, self.d, polys.shape[2]), dtype=complex)
        out[:polys.shape[0]] = polys
        return out.reshape(self.K * self.d, -1)


def default_truncation(F, extra=4) -> HardyTruncation:
    F = as_rational(F)
    return HardyTruncation(F.shape[0], 2 * (F.degree() + len(F.den_zeros)) + extra, F.den_zeros)


@dataclass
class BlockHankel:
    matrix: np.ndarray
    block_shape: tuple
    trunc: HardyTruncation = field(repr=False, default=None)


@dataclass
class BlockToeplitz:
    matrix: np.ndarray
    block_shape: tuple
    trunc: HardyTruncation = field(repr=False, default=None)


def hankel_of_adjoint(Phi, trunc: HardyTruncation) -> BlockHankel:
    """Matrix of ``f -> J P_-(Phi^* f)`` on the truncation.

    Rows are the coefficients of ``Phi^* f`` at z^-1, z^-2, ...; block (i, j)
    is the Fourier coefficient of ``Phi^* / q_w`` at ``-1 - i - j``.
    """
    Phi = as_rational(Phi)
    d, c = Phi.shape
    if d != trunc.d:
        raise ValueError(f"symbol has {d} rows but the truncation has fibre dimension {trunc.d}")
    K = trunc.K
    A = Phi.numerator.coeffs
    if not Phi.den_zeros and not trunc.den_zeros:
        # exact: blocks Phi^(i + j + 1)^*
        L = K
        H = np.zeros((L * c, K * d), dtype=complex)
        for i in range(L):
            for j in range(K):
                n = i + j + 1
                if n < A.shape[0]:
                    H[i * c:(i + 1) * c, j * d:(j + 1) * d] = adj(A[n])
        return BlockHankel(H, (c, d), trunc)

    rho_phi = max((abs(a) for a in Phi.den_zeros), default=0.0)
    rho_w = max((abs(a) for a in trunc.den_zeros), default=0.0)
    L = A.shape[0] + _tail(rho_phi) + 1
    G = _pow2_at_least(4 * (L + K + _tail(rho_w) + A.shape[0] + 8))
    z = grid_points(G)
    R = adj(Phi(z)) / den_values(trunc.den_zeros, z)[:, None, None]
    Rhat = np.fft.fft(R, axis=0) / G
    H = np.zeros((L * c, K * d), dtype=complex)
    for i in range(L):
        for j in range(K):
            H[i * c:(i + 1) * c, j * d:(j + 1) * d] = Rhat[(-1 - i - j) % G]
    return BlockHankel(H, (c, d), trunc)


def toeplitz_compress(Phi, trunc: HardyTruncation) -> BlockToeplitz:
    """Block Toeplitz matrix ``T[i, j] = Phi^(i - j)`` on unweighted polynomials of degree < K."""
    Phi = as_rational(Phi)
    if trunc.den_zeros:
        raise ValueError("toeplitz_compress works on the unweighted truncation")
    r, c = Phi.shape
    K = trunc.K
    if Phi.den_zeros:
        G = _pow2_at_least(4 * (K + _tail(max(abs(a) for a in Phi.den_zeros)) + Phi.degree()))
        coef = np.fft.fft(Phi(grid_points(G)), axis=0) / G
    else:
        coef = Phi.numerator.padded(K)
    T = np.zeros((K * r, K * c), dtype=complex)
    for i in range(K):
        for j in range(i + 1):
            T[i * r:(i + 1) * r, j * c:(j + 1) * c] = coef[i - j]
    return BlockToeplitz(T, (r, c), trunc)


def _sup_norm(Phi) -> float:
    return float(np.linalg.norm(to_grid(Phi).values, ord=2, axis=(1, 2)).max())


def hankel_kernel_basis(Phi, trunc: HardyTruncation, tol=None) -> np.ndarray:
    """Orthonormal columns spanning the numerical kernel of ``H_{Phi^*}``."""
    H = hankel_of_adjoint(Phi, trunc).matrix
    return kernel_basis(H, tol, scale=_sup_norm(Phi))


def kernel_codim(Phi, trunc: HardyTruncation, tol=None) -> int:
    return trunc.dim - hankel_kernel_basis(Phi, trunc, tol).shape[1]


def rationality_test(Phi, theta, trunc: HardyTruncation, tol=None) -> bool:
    """True iff ``H_{Phi^*}`` kills ``theta z^k e_j`` for every k with ``k + deg theta < K - deg Phi``."""
    tol = as_tol(tol)
    Phi = as_rational(Phi)
    d = Phi.shape[0]
    M = theta.degree
    if trunc.K < Phi.degree() + M + 2:
        raise ValueError(f"K={trunc.K} too small, need >= {Phi.degree() + M + 2}")
    tr = HardyTruncation(d, trunc.K, theta.zeros)
    H = hankel_of_adjoint(Phi, tr).matrix
    top = np.array([1.0 + 0j])
    for a in theta.zeros:
        top = np.convolve(top, [-a, 1.0])
    scale = max(1.0, _sup_norm(Phi))
    k = 0
    while k + M < trunc.K - Phi.degree():
        p = np.zeros(trunc.K, dtype=complex)
        p[k:k + M + 1] = top
        for j in range(d):
            v = np.kron(p, np.eye(d)[j])
            if np.linalg.norm(H @ v) > tol.abs * scale:
                return False
        k += 1
    return True


def _gram_orthonormalize(B, gram, tol):
    """Columns spanning ran B, orthonormal for the Gram inner product."""
    B = range_basis(B, tol) if B.shape[1] else B
    M = adj(B) @ gram @ B
    M = (M + adj(M)) / 2
    w, U = np.linalg.eigh(M)
    if B.shape[1] and w.min() <= 0:
        raise CertificationFailure("Gram matrix is not positive definite on the basis", float(w.min()))
    return B @ (U / np.sqrt(w)) @ adj(U)


def blh_extract(basis, trunc: HardyTruncation, tol=None) -> RationalMatFn:
    """Inner function whose shifts span the shift-invariant subspace ``span(basis)``.

    Computes the wandering subspace ``M (-) zM`` within the truncation and
    reads an orthonormal basis of it as the columns of Delta. The result
    is certified inner on the grid.
    """
    tol = as_tol(tol)
    d, K = trunc.d, trunc.K
    B = np.asarray(basis, dtype=complex)
    if B.ndim != 2 or B.shape[0] != trunc.dim:
        raise ValueError(f"basis must have {trunc.dim} rows")
    gram = trunc.gram()
    Bg = _gram_orthonormalize(B, gram, tol)
    m = Bg.shape[1]
    if m == 0:
        return RationalMatFn(MatPoly(np.zeros((1, d, 0))), ())

    # elements of M with a vanishing top coefficient, multiplied by z
    N = kernel_basis(Bg[(K - 1) * d:], tol, scale=1.0)
    low = Bg @ N
    Z = np.zeros_like(low)
    Z[d:] = low[:-d]
    proj = Bg @ (adj(Bg) @ gram @ Z)
    leak = fro(Z - proj)
    if leak > tol.abs * max(1.0, fro(Z)):
        raise NotShiftInvariant(f"z M leaves span(basis) by {leak:.3e}", leak)

    C = adj(Bg) @ gram @ Z
    Cq = range_basis(C, tol, scale=1.0)
    Wc = orth_complement(Cq, m)
    W = Bg @ Wc
    Delta = trunc.to_function(W)
    Delta = cancel_den_zeros(Delta, tol)
    r = inner_residual(Delta)
    if r > tol.abs:
        raise NotInner(f"extracted function is not inner (residual {r:.3e})", r)
    return Delta


def blh_extract_stable(basis_fn, trunc: HardyTruncation, tol=None) -> RationalMatFn:
    """:func:`blh_extract` at K and K+2; the number of columns must agree."""
    D1 = blh_extract(basis_fn(trunc), trunc, tol)
    big = trunc.grown(2)
    D2 = blh_extract(basis_fn(big), big, tol)
    if D1.shape[1] != D2.shape[1]:
        raise TruncationTooSmall(f"wandering dimension changed from {D1.shape[1]} to {D2.shape[1]} "
                                 f"when K went from {trunc.K} to {big.K}")
    return D1


def right_unitary_align(A, B, tol=None):
    """``U`` with ``A = B U`` (U = B(z0)^* A(z0) at a grid node), plus the grid residual."""
    A, B = as_rational(A), as_rational(B)
    g = max(A.grid_log2, B.grid_log2)
    SA, SB = to_grid(A, g).values, to_grid(B, g).values
    U = adj(SB[0]) @ SA[0]
    return U, float(np.linalg.norm(SA - SB @ U, axis=(1, 2)).max())


def complementary_factor(Omega, trunc: HardyTruncation | None = None, tol=None) -> RationalMatFn:
    """Columns ``Omega_c`` making ``[Omega, Omega_c]`` generate ``ker H_{Omega^*}``.

    The kernel's inner function Theta0 satisfies ``Omega = Theta0 X`` for a
    constant isometry X; ``Omega_c = Theta0 X_c`` with X_c spanning the
    complement of ran X. May have zero columns.
    """
    tol = as_tol(tol)
    Omega = as_rational(Omega)
    d, c = Omega.shape
    if trunc is None:
        trunc = default_truncation(Omega)
    Theta0 = blh_extract_stable(lambda tr: hankel_kernel_basis(Omega, tr, tol), trunc, tol)
    if Theta0.shape[1] != d:
        raise CertificationFailure(f"kernel inner function has {Theta0.shape[1]} columns, expected {d}")
    g = max(Omega.grid_log2, Theta0.grid_log2)
    S0, SO = to_grid(Theta0, g).values, to_grid(Omega, g).values
    X = adj(S0[0]) @ SO[0]
    res = float(np.linalg.norm(S0 @ X - SO, axis=(1, 2)).max())
    if res > tol.abs:
        raise CertificationFailure(f"Omega is not a constant right multiple of the kernel function ({res:.3e})", res)
    Xc = orth_complement(range_basis(X, tol, scale=1.0), d)
    num = Theta0.numerator.coeffs @ Xc
    return RationalMatFn(MatPoly(num), Theta0.den_zeros)


def _span_vectors(F: RationalMatFn, trunc: HardyTruncation, others) -> np.ndarray:
    """Coefficient vectors of ``z^j F e_i`` that fit in the truncation."""
    N = F.numerator.coeffs
    for a in others:      # bring over the common denominator
        N = np.concatenate([N, np.zeros((1,) + N.shape[1:])]) - np.conj(a) * np.concatenate([np.zeros((1,) + N.shape[1:]), N])
    deg = N.shape[0] - 1
    cols = []
    for j in range(trunc.K - deg):
        P = np.zeros((trunc.K,) + N.shape[1:], dtype=complex)
        P[j:j + deg + 1] = N
        cols.append(trunc.from_polys(P))
    if not cols:
        return np.zeros((trunc.dim, 0), dtype=complex)
    return np.concatenate(cols, axis=1)


def left_gcd(Phi, Psi, trunc: HardyTruncation | None = None, tol=None) -> RationalMatFn:
    """Inner function generating ``cl(Phi H^2 + Psi H^2)``."""
    tol = as_tol(tol)
    Phi, Psi = as_rational(Phi), as_rational(Psi)
    if Phi.shape[0] != Psi.shape[0]:
        raise ValueError("Phi and Psi must have the same number of rows")
    den = Phi.den_zeros + Psi.den_zeros
    if trunc is None:
        deg = max(Phi.degree(), Psi.degree()) + len(den)
        trunc = HardyTruncation(Phi.shape[0], 2 * deg + 4, den)
    elif trunc.den_zeros != den:
        trunc = HardyTruncation(trunc.d, trunc.K, den)

    def basis(tr):
        return np.concatenate([_span_vectors(Phi, tr, Psi.den_zeros), _span_vectors(Psi, tr, Phi.den_zeros)], axis=1)

    return blh_extract_stable(basis, trunc, tol)


def common_right_divisor(Phi, Psi, trunc: HardyTruncation | None = None, tol=None) -> RationalMatFn:
    """A nontrivial two-sided inner D with ``Phi = A D`` and ``Psi = B D``.

    Raises TrivialGcd when the only common right inner divisors are constants.
    """
    tol = as_tol(tol)
    Phi, Psi = as_rational(Phi), as_rational(Psi)
    Delta = left_gcd(tilde(Phi), tilde(Psi), None if trunc is None else
                     HardyTruncation(Phi.shape[1], trunc.K), tol)
    if Delta.shape[1] < Delta.shape[0]:
        comp = complementary_factor(Delta, None, tol)
        full = RationalMatFn(MatPoly(np.concatenate([Delta.numerator.coeffs, _pad_to(comp, Delta)], axis=2)),
                             Delta.den_zeros)
    else:
        full = Delta
    D = tilde(full)
    S = to_grid(D).values
    if float(np.linalg.norm(S - S.mean(axis=0), axis=(1, 2)).max()) <= tol.abs:
        raise TrivialGcd("the common right inner divisor is a constant unitary")
    for name, F in (("Phi", Phi), ("Psi", Psi)):
        _certify_right_division(F, D, tol, name)
    return D


def _pad_to(comp: RationalMatFn, Delta: RationalMatFn) -> np.ndarray:
    """Numerator of comp over Delta's denominator (comp's zeros are a sub-multiset of Delta's)."""
    extra = list(Delta.den_zeros)
    for a in comp.den_zeros:
        i = int(np.argmin([abs(a - b) for b in extra]))
        del extra[i]
    N = comp.numerator.coeffs
    for a in extra:
        N = np.concatenate([N, np.zeros((1,) + N.shape[1:])]) - np.conj(a) * np.concatenate([np.zeros((1,) + N.shape[1:]), N])
    n = max(N.shape[0], Delta.numerator.coeffs.shape[0])
    out = np.zeros((n,) + N.shape[1:], dtype=complex)
    out[:N.shape[0]] = N
    if n > Delta.numerator.coeffs.shape[0]:
        raise CertificationFailure("complementary factor has a larger degree than expected")
    return out


def _certify_right_division(F: RationalMatFn, D: RationalMatFn, tol, name):
    deg = F.degree() + len(D.den_zeros)
    g = grid_log2_for(deg + D.degree(), len(F.den_zeros) + len(D.den_zeros)) + 1
    z = grid_points(2 ** g)
    S = GridSamples(F(z) @ adj(D(z)))
    try:
        from_grid(S, deg, F.den_zeros, tol)
    except CertificationFailure as exc:
        raise CertificationFailure(f"divisor does not right-divide {name}: {exc}", exc.residual) from None
