"""Ginibre spectra: matrix sampling, a dense complex eigensolver, Kostlan moduli.

The eigensolver is the textbook route: Householder reduction to upper
Hessenberg form followed by single-shift complex QR sweeps with Wilkinson
shifts and deflation, the last 2 x 2 block solved in closed form. Only
eigenvalues are computed, so rotations are applied to the active window
alone.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

from .measures import GinibreNormalized
from .polynomial import ZeroSet

MAX_DIM = 2000


class ConvergenceError(RuntimeError):
    """QR iteration failed; ``log`` holds |h[hi, hi-1]| per sweep and the window."""

    def __init__(self, message, log):
        super().__init__(message)
        self.log = log


def sample_ginibre_matrix(n: int, seed=None) -> np.ndarray:
    """n x n matrix of i.i.d. standard complex Gaussians, E|a_ij|^2 = 1."""
    if not 1 <= n <= MAX_DIM:
        raise ValueError(f"need 1 <= n <= {MAX_DIM}, got {n}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n, 2)) * math.sqrt(0.5)
    return g[..., 0] + 1j * g[..., 1]


@njit(cache=True)
def _hessenberg(A):
    H = A.copy()
    n = H.shape[0]
    for k in range(n - 2):
        m = n - k - 1
        v = np.empty(m, dtype=np.complex128)
        norm2 = 0.0
        for i in range(m):
            v[i] = H[k + 1 + i, k]
            norm2 += v[i].real ** 2 + v[i].imag ** 2
        xnorm = math.sqrt(norm2)
        if xnorm == 0.0:
            continue
        x0 = v[0]
        ax0 = abs(x0)
        phase = x0 / ax0 if ax0 > 0 else 1.0 + 0j
        alpha = -phase * xnorm
        v[0] = x0 - alpha
        vnorm2 = norm2 - ax0 * ax0 + abs(v[0]) ** 2
        if vnorm2 == 0.0:
            continue
        scale = 2.0 / vnorm2
        # H <- (I - scale v v^H) H on rows k+1.., columns k..
        for j in range(k, n):
            s = 0j
            for i in range(m):
                s += v[i].conjugate() * H[k + 1 + i, j]
            s *= scale
            for i in range(m):
                H[k + 1 + i, j] -= v[i] * s
        # H <- H (I - scale v v^H) on columns k+1..
        for i in range(n):
            s = 0j
            for j in range(m):
                s += H[i, k + 1 + j] * v[j]
            s *= scale
            for j in range(m):
                H[i, k + 1 + j] -= s * v[j].conjugate()
        for i in range(k + 2, n):
            H[i, k] = 0.0
    return H


@njit(cache=True)
def _eig2(a, b, c, d):
    half_tr = 0.5 * (a + d)
    disc = np.sqrt(0.25 * (a - d) * (a - d) + b * c)
    return half_tr + disc, half_tr - disc


@njit(cache=True)
def _hessenberg_qr(H, max_iter):
    n = H.shape[0]
    eigs = np.empty(n, dtype=np.complex128)
    log = np.zeros((max_iter, 3))
    eps = 2.220446049250313e-16
    hi = n - 1
    its = 0
    total = 0
    cs = np.empty(n, dtype=np.complex128)
    sn = np.empty(n, dtype=np.complex128)
    while hi >= 0:
        if hi == 0:
            eigs[0] = H[0, 0]
            break
        lo = hi
        while lo > 0:
            tol = eps * (abs(H[lo, lo]) + abs(H[lo - 1, lo - 1]))
            if tol == 0.0:
                tol = eps
            if abs(H[lo, lo - 1]) <= tol:
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            eigs[hi] = H[hi, hi]
            hi -= 1
            its = 0
            continue
        if lo == hi - 1:
            e1, e2 = _eig2(H[hi - 1, hi - 1], H[hi - 1, hi], H[hi, hi - 1], H[hi, hi])
            eigs[hi - 1] = e1
            eigs[hi] = e2
            hi -= 2
            its = 0
            continue
        if total >= max_iter:
            return eigs, -1, log
        a = H[hi - 1, hi - 1]
        d = H[hi, hi]
        if its > 0 and its % 10 == 0:
            sub = H[hi, hi - 1]
            mu = d + 0.75 * (abs(sub.real) + abs(sub.imag))
        else:
            m1, m2 = _eig2(a, H[hi - 1, hi], H[hi, hi - 1], d)
            mu = m1 if abs(m1 - d) <= abs(m2 - d) else m2
        log[total, 0] = abs(H[hi, hi - 1])
        log[total, 1] = lo
        log[total, 2] = hi
        for k in range(lo, hi + 1):
            H[k, k] -= mu
        for k in range(lo, hi):
            x = H[k, k]
            y = H[k + 1, k]
            r = math.sqrt(x.real ** 2 + x.imag ** 2 + y.real ** 2 + y.imag ** 2)
            if r == 0.0:
                c = 1.0 + 0j
                s = 0j
            else:
                c = x / r
                s = y / r
            cs[k] = c
            sn[k] = s
            cc = c.conjugate()
            sc = s.conjugate()
            for j in range(k, hi + 1):
                t1 = H[k, j]
                t2 = H[k + 1, j]
                H[k, j] = cc * t1 + sc * t2
                H[k + 1, j] = -s * t1 + c * t2
        for k in range(lo, hi):
            c = cs[k]
            s = sn[k]
            sc = s.conjugate()
            cc = c.conjugate()
            top = min(k + 2, hi)
            for i in range(lo, top + 1):
                t1 = H[i, k]
                t2 = H[i, k + 1]
                H[i, k] = t1 * c + t2 * s
                H[i, k + 1] = -t1 * sc + t2 * cc
        for k in range(lo, hi + 1):
            H[k, k] += mu
        its += 1
        total += 1
    return eigs, total, log


def hessenberg(A) -> np.ndarray:
    """Unitarily similar upper Hessenberg form of a square complex matrix."""
    A = np.ascontiguousarray(A, dtype=np.complex128)
    return _hessenberg(A)


def eigenvalues(matrix) -> ZeroSet:
    """All eigenvalues (with multiplicity) of a square finite complex matrix."""
    A = np.asarray(matrix, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"need a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    n = A.shape[0]
    if n == 1:
        return ZeroSet(A[0].copy())
    H = _hessenberg(np.ascontiguousarray(A))
    max_iter = 100 * n
    eigs, info, log = _hessenberg_qr(H, max_iter)
    if info < 0:
        raise ConvergenceError(f"QR iteration did not converge in {max_iter} sweeps", log)
    return ZeroSet(eigs)


def normalized_spectrum(n: int, seed=None) -> ZeroSet:
    """Eigenvalues of a fresh Ginibre matrix divided by sqrt(n)."""
    ev = eigenvalues(sample_ginibre_matrix(n, seed)).zeros
    return ZeroSet(ev / math.sqrt(n), provenance=GinibreNormalized())


def sample_kostlan_moduli(n: int, seed=None) -> np.ndarray:
    """Multiset {Y_1..Y_n} with Y_j ~ Gamma(j, 1), drawn independently.

    Equal in law to the squared eigenvalue moduli of an unnormalized n x n
    Ginibre matrix. Angles are not modelled, so this never stands in for a
    spectrum.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    rng = np.random.default_rng(seed)
    return rng.gamma(np.arange(1, n + 1, dtype=float), 1.0)
