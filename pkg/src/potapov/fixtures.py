"""Seeded random fixtures: Blaschke-Potapov products and engineered test functions."""

from __future__ import annotations

import numpy as np

from .blaschke import BPFactor, BPProduct, FiniteBlaschkeProduct, bp_to_json, expand, theta_to_json
from .funcspace import (GridSamples, MatPoly, RationalMatFn, fn_to_json, from_grid, grid_log2_for, grid_points,
                        inner_residual)
from .numerics import random_projection, random_unitary


def random_point(rng, max_abs=0.9):
    return max_abs * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())


def random_alphas(rng, M, max_abs=0.9, repeat_prob=0.3):
    out = []
    for _ in range(M):
        if out and rng.uniform() < repeat_prob:
            out.append(out[int(rng.integers(len(out)))])
        else:
            out.append(random_point(rng, max_abs))
    return out


def random_bp(rng, d, M, max_abs=0.9, repeat_prob=0.3, min_rank=0) -> BPProduct:
    alphas = random_alphas(rng, M, max_abs, repeat_prob)
    fs = [BPFactor(a, random_projection(d, int(rng.integers(min_rank, d + 1)), rng)) for a in alphas]
    return BPProduct(random_unitary(d, rng), fs)


def random_matrix(rng, r, c):
    return (rng.standard_normal((r, c)) + 1j * rng.standard_normal((r, c))) / np.sqrt(2)


def gen_fixture(d, factors, seed, max_abs=0.9) -> dict:
    """A random product, its expansion and its theta; identical for identical seeds."""
    rng = np.random.default_rng(seed)
    B = random_bp(rng, d, factors, max_abs)
    F = expand(B)
    r = inner_residual(F, two_sided=True)
    if r > 1e-9:
        raise RuntimeError(f"generated expansion is not inner ({r:.3e})")
    return {"bp": bp_to_json(B), "expansion": fn_to_json(F), "theta": theta_to_json(FiniteBlaschkeProduct(B.alphas))}


def poly_about(rng, d, alpha, C0, deg=2, den=()):
    """``C0 + sum_k (z - alpha)^k C_k`` over ``prod (1 - conj(b) z)``."""
    num = C0[None].astype(complex)
    lin = np.array([-alpha, 1.0])
    p = np.array([1.0 + 0j])
    for _ in range(deg):
        p = np.convolve(p, lin)
        term = p[:, None, None] * random_matrix(rng, d, d)[None]
        n = max(num.shape[0], term.shape[0])
        acc = np.zeros((n, d, d), dtype=complex)
        acc[:num.shape[0]] += num
        acc[:term.shape[0]] += term
        num = acc
    # keep the value at alpha: multiply numerator by q(z)/q(alpha)
    for b in den:
        nxt = np.zeros((num.shape[0] + 1,) + num.shape[1:], dtype=complex)
        nxt[:-1] += num
        nxt[1:] -= np.conj(b) * num
        num = nxt / (1 - np.conj(b) * alpha)
    return RationalMatFn(MatPoly(num), den)


def singular_fixture(rng, d=None):
    """``(Phi, theta, alpha)`` with ``Phi(alpha)`` rank deficient at a zero alpha of theta."""
    d = int(rng.integers(2, 5)) if d is None else d
    zeros = [random_point(rng, 0.8) for _ in range(int(rng.integers(1, 4)))]
    alpha = zeros[int(rng.integers(len(zeros)))]
    r = int(rng.integers(0, d))
    C0 = random_matrix(rng, d, r) @ random_matrix(rng, r, d) if r else np.zeros((d, d), dtype=complex)
    den = [random_point(rng, 0.7) for _ in range(int(rng.integers(0, 3)))]
    return poly_about(rng, d, alpha, C0, 2, den), FiniteBlaschkeProduct(zeros), alpha


def invertible_fixture(rng, d=None):
    """``(Phi, theta)`` with ``Phi`` invertible at every zero of theta (smallest singular value >= 0.05)."""
    d = int(rng.integers(1, 5)) if d is None else d
    while True:
        zeros = [random_point(rng, 0.8) for _ in range(int(rng.integers(1, 4)))]
        den = [random_point(rng, 0.7) for _ in range(int(rng.integers(0, 3)))]
        Phi = poly_about(rng, d, zeros[0], random_unitary(d, rng), 2, den)
        if all(np.linalg.svd(Phi(a), compute_uv=False).min() >= 0.05 for a in zeros):
            return Phi, FiniteBlaschkeProduct(zeros)


def rational_fixture(rng, d=None, max_deg=4):
    """``Phi = N / q_theta`` with ``deg N <= deg theta``, so ``theta Phi^*`` is analytic."""
    d = int(rng.integers(1, 4)) if d is None else d
    M = int(rng.integers(1, max_deg + 1))
    theta = FiniteBlaschkeProduct([random_point(rng, 0.8) for _ in range(M)])
    n = int(rng.integers(0, M + 1))
    N = np.stack([random_matrix(rng, d, d) for _ in range(n + 1)])
    return RationalMatFn(MatPoly(N), theta.zeros), theta


def disjoint_theta(rng, theta: FiniteBlaschkeProduct, gap=0.2):
    zs = []
    while len(zs) < max(1, theta.degree):
        a = random_point(rng, 0.8)
        if all(abs(a - b) > gap for b in theta.zeros):
            zs.append(a)
    return FiniteBlaschkeProduct(zs)


def blh_fixture(rng, kind=None):
    """``(Phi, Delta)`` with ``ker H_{Phi^*} = Delta H^2``.

    ``"product"``: Phi = Delta C^* for a random product Delta and invertible constant C.
    ``"theta"``: Phi = theta B^* with ``B = C_0 + sum_j C_j / (1 - conj(a_j) z)``, so Delta = theta I.
    """
    kind = kind or ("product" if rng.uniform() < 0.5 else "theta")
    d = int(rng.integers(1, 4))
    if kind == "product":
        B = random_bp(rng, d, int(rng.integers(1, 4)), max_abs=0.7, repeat_prob=0.2, min_rank=1)
        D = expand(B)
        C = random_unitary(d, rng) @ np.diag(rng.uniform(0.5, 2.0, d)) @ random_unitary(d, rng)
        return RationalMatFn(MatPoly(D.numerator.coeffs @ C.conj().T), D.den_zeros), D
    zeros = [random_point(rng, 0.7) for _ in range(int(rng.integers(1, 4)))]
    theta = FiniteBlaschkeProduct(zeros)
    Th = theta.as_function(d)
    # B^* on the circle equals C_0^* + sum_j C_j^* z / (z - a_j); theta B^* is analytic with den = zeros
    samples_fn = _theta_bstar(theta, [random_matrix(rng, d, d) for _ in range(len(zeros) + 1)])
    g = grid_log2_for(len(zeros), len(zeros)) + 1
    Phi = from_grid(GridSamples(samples_fn(grid_points(2 ** g))), len(zeros), zeros, 1e-10)
    return Phi, Th


def _theta_bstar(theta, Cs):
    def f(z):
        z = np.asarray(z, dtype=complex)
        val = np.broadcast_to(Cs[0].conj().T, z.shape + Cs[0].shape).astype(complex)
        for a, C in zip(theta.zeros, Cs[1:]):
            val = val + (z / (z - a))[:, None, None] * C.conj().T
        return theta(z)[:, None, None] * val
    return f
