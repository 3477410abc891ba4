"""Dense complex linear algebra with explicit tolerances.

Matrices are plain 2-D ``complex128`` numpy arrays. Every rank decision in
the package goes through :func:`numerical_rank`, so ``Tolerance.rank_rel``
is the single knob deciding what counts as "range" or "kernel".
Residuals are always Frobenius norms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Tolerance:
    abs: float = 1e-8
    rank_rel: float = 1e-9

    def __post_init__(self):
        if not self.abs > 0:
            raise ValueError("Tolerance.abs must be positive")
        if not 0 < self.rank_rel < 1:
            raise ValueError("Tolerance.rank_rel must lie in (0, 1)")


DEFAULT_TOL = Tolerance()


def as_tol(tol) -> Tolerance:
    if tol is None:
        return DEFAULT_TOL
    if isinstance(tol, Tolerance):
        return tol
    return Tolerance(abs=float(tol))


def as_cmatrix(A) -> np.ndarray:
    """Coerce to a finite 2-D complex array (scalars become 1x1)."""
    M = np.asarray(A, dtype=complex)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    elif M.ndim == 1:
        M = M.reshape(-1, 1)
    if M.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def adj(A):
    """Conjugate transpose over the last two axes."""
    return np.conj(np.swapaxes(A, -1, -2))


def fro(A) -> float:
    return float(np.linalg.norm(A))


def numerical_rank(s, tol=None, scale=None) -> int:
    """Number of singular values strictly above ``rank_rel * s.max()``.

    ``scale`` is a known a-priori norm of the matrix (e.g. 1 for values of
    a contraction); the cutoff is then ``rank_rel * max(s.max(), scale)`` so
    that a matrix of pure rounding noise gets rank 0.
    """
    tol = as_tol(tol)
    s = np.asarray(s)
    if s.size == 0 or s[0] == 0:
        return 0
    ref = s[0] if scale is None else max(s[0], scale)
    return int(np.sum(s > tol.rank_rel * ref))


def range_basis(A, tol=None, scale=None) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical range of ``A``."""
    A = as_cmatrix(A)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    return U[:, : numerical_rank(s, tol, scale)]


def kernel_basis(A, tol=None, scale=None) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical kernel of ``A``."""
    A = as_cmatrix(A)
    _, s, Vh = np.linalg.svd(A, full_matrices=True)
    r = numerical_rank(s, tol, scale)
    return adj(Vh)[:, r:]


def range_projection(A, tol=None, scale=None) -> np.ndarray:
    Q = range_basis(A, tol, scale)
    return Q @ adj(Q)


def kernel_projection(A, tol=None, scale=None) -> np.ndarray:
    Q = kernel_basis(A, tol, scale)
    return Q @ adj(Q)


def is_partial_isometry(A, tol=None) -> bool:
    A = as_cmatrix(A)
    return fro(A @ adj(A) @ A - A) <= as_tol(tol).abs


def is_unitary(A, tol=None) -> bool:
    A = as_cmatrix(A)
    if A.shape[0] != A.shape[1]:
        return False
    eye = np.eye(A.shape[0])
    t = as_tol(tol).abs
    return fro(adj(A) @ A - eye) <= t and fro(A @ adj(A) - eye) <= t


def is_projection(P, tol=None) -> bool:
    P = as_cmatrix(P)
    if P.shape[0] != P.shape[1]:
        return False
    t = as_tol(tol).abs
    return fro(P @ P - P) <= t and fro(P - adj(P)) <= t


def orthogonal_decomposition_check(Ps, tol=None) -> bool:
    """True iff the projections are mutually orthogonal and sum to I."""
    Ps = [as_cmatrix(P) for P in Ps]
    if not Ps:
        return False
    t = as_tol(tol).abs
    for i, Pi in enumerate(Ps):
        for Pj in Ps[i + 1:]:
            if fro(Pi @ Pj) > t:
                return False
    return fro(sum(Ps) - np.eye(Ps[0].shape[0])) <= t


def orth_complement(Q, n=None) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of ran Q (Q orthonormal)."""
    Q = np.asarray(Q, dtype=complex)
    n = Q.shape[0] if n is None else n
    if Q.shape[1] == 0:
        return np.eye(n, dtype=complex)
    U, _, _ = np.linalg.svd(Q, full_matrices=True)
    return U[:, Q.shape[1]:]


def random_unitary(d, rng) -> np.ndarray:
    Z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph


def random_projection(d, rank, rng) -> np.ndarray:
    Q = random_unitary(d, rng)[:, :rank]
    return Q @ adj(Q)


# JSON wire format: {"rows": r, "cols": c, "data": [[re, im], ...]} row-major.

def cmatrix_to_json(A) -> dict:
    A = as_cmatrix(A)
    flat = A.reshape(-1)
    return {
        "rows": int(A.shape[0]),
        "cols": int(A.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in flat],
    }


def cmatrix_from_json(obj) -> np.ndarray:
    try:
        r, c, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed CMatrix: {exc}") from None
    if len(data) != r * c:
        raise ValueError(f"CMatrix data has {len(data)} entries, expected {r * c}")
    vals = np.array([complex(re, im) for re, im in data], dtype=complex)
    return as_cmatrix(vals.reshape(r, c))


def complex_to_json(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(obj) -> complex:
    if isinstance(obj, (int, float)):
        return complex(obj)
    re, im = obj
    return complex(re, im)
