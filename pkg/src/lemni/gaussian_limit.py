"""Limit objects for zeros drawn uniformly from the unit circle.

For |z| < 1 the normalized field g_n(z) = n^{-1/2} sum_k log|z - X_k| has
mean zero and covariance

    K(z, w) = (1/2pi) int log|z - e^{it}| log|w - e^{it}| dt
            = (1/2) Re sum_{k>=1} (z conj(w))^k / k^2,

and converges to the Gaussian field g(z) = Re sum_k (a_k / k) z^k with
a_k i.i.d. standard complex Gaussian (E|a_k|^2 = 1, E a_k^2 = 0), whose
covariance is exactly K.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .polynomial import as_zeros
from .raster import Box, inradius_estimate, rasterize_field

MAX_EVAL_RADIUS = 0.99


def g_n_field(zeros, z) -> float:
    """n^{-1/2} sum_k log|z - X_k| for zeros on the unit circle and |z| < 1."""
    X = as_zeros(zeros)
    zz = np.asarray(z, dtype=complex)
    if np.any(np.abs(zz) >= 1):
        raise ValueError("g_n is defined on the open unit disk")
    # |z - X| = |1 - z conj(X)| for |X| = 1; exact at z = 0
    vals = np.log(np.abs(1 - zz[..., None] * np.conj(X))).sum(axis=-1) / math.sqrt(X.size)
    return float(vals) if vals.ndim == 0 else vals


def _check_disk(*pts):
    for p in pts:
        if abs(complex(p)) >= 1:
            raise ValueError("kernel arguments must lie in the open unit disk")


def covariance_series(z, w, K_terms: int) -> tuple[float, float]:
    """Partial sum of K(z, w) over k <= K_terms and a bound on the dropped tail."""
    _check_disk(z, w)
    if K_terms < 1:
        raise ValueError("need at least one term")
    q = complex(z) * complex(w).conjugate()
    k = np.arange(1, K_terms + 1)
    terms = q ** k / (k * k.astype(float))
    # sum in reverse so the small terms accumulate first
    value = 0.5 * float(np.sum(terms[::-1]).real)
    aq = abs(q)
    tail = 0.5 * aq ** (K_terms + 1) / ((K_terms + 1) ** 2 * (1 - aq))
    return value, tail


def covariance_quadrature(z, w, M_points: int = 4096) -> float:
    """Trapezoidal rule for the circle integral defining K(z, w)."""
    _check_disk(z, w)
    if M_points < 64:
        raise ValueError("need at least 64 quadrature points")
    e = np.exp(2j * np.pi * np.arange(M_points) / M_points)
    a = np.log(np.abs(1 - complex(z) * e.conj()))
    b = np.log(np.abs(1 - complex(w) * e.conj()))
    return float(np.mean(a * b))


@dataclass(frozen=True, eq=False)
class GaussianFieldSample:
    """Truncated series g(z) = Re sum_{k<=K} (a_k / k) z^k."""

    coefficients: np.ndarray  # a_1..a_K

    def __post_init__(self):
        a = np.array(self.coefficients, dtype=complex).ravel()
        if a.size < 1 or not np.all(np.isfinite(a)):
            raise ValueError("need at least one finite coefficient")
        object.__setattr__(self, "coefficients", a)

    @property
    def K(self) -> int:
        return self.coefficients.size

    @property
    def series_coefficients(self) -> np.ndarray:
        """c_k = a_k / k, so that g = Re sum c_k z^k."""
        return self.coefficients / np.arange(1, self.K + 1)


def sample_g(K_truncation: int = 500, seed=None) -> GaussianFieldSample:
    if K_truncation < 1:
        raise ValueError("need K >= 1")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((K_truncation, 2)) * math.sqrt(0.5)
    return GaussianFieldSample(g[:, 0] + 1j * g[:, 1])


def _horner(c: np.ndarray, z: np.ndarray, derivative: bool = False):
    """sum_{k>=1} c_k z^k (and its derivative) for c = (c_1..c_K)."""
    p = np.zeros_like(z)
    dp = np.zeros_like(z)
    for ck in c[::-1]:
        if derivative:
            dp = dp * z + p
        p = p * z + ck
    if derivative:
        dp = dp * z + p
    return (p * z, dp) if derivative else p * z


def evaluate_g(sample: GaussianFieldSample, z):
    """Value of the truncated field at ``z`` (|z| <= 0.99)."""
    zz = np.asarray(z, dtype=complex)
    if np.any(np.abs(zz) > MAX_EVAL_RADIUS):
        raise ValueError(f"evaluate_g is limited to |z| <= {MAX_EVAL_RADIUS}")
    v = _horner(sample.series_coefficients, zz.ravel()).real.reshape(zz.shape)
    return float(v) if v.ndim == 0 else v


def truncation_tail_std(K_truncation: int, radius: float) -> float:
    """Pointwise standard deviation of the dropped terms k > K at |z| = radius."""
    k = np.arange(K_truncation + 1, K_truncation + 200_000, dtype=float)
    return math.sqrt(0.5 * float(np.sum(radius ** (2 * k) / (k * k))))


class GaussianField:
    """Block bound for the truncated field, used by the quadtree rasterizer.

    With G(z) = sum c_k z^k and |z - c| <= r, Taylor's theorem gives
    |g(z) - g(c)| <= |G'(c)| r + r^2/2 * sum k(k-1)|c_k| (|c| + r)^{k-2}.
    """

    def __init__(self, sample: GaussianFieldSample):
        self.c = sample.series_coefficients
        self.X = np.empty(self.c.size)  # width hint for chunking
        self.tol = 1e-9
        k = np.arange(1, self.c.size + 1, dtype=float)
        self._w2 = k * (k - 1) * np.abs(self.c)

    def value_and_bound(self, c: np.ndarray, r: np.ndarray):
        G, dG = _horner(self.c, c.astype(complex), derivative=True)
        R = np.abs(c) + r
        # sum_k k(k-1)|c_k| R^(k-2) by Horner on the real weights
        acc = np.zeros_like(R)
        for wk in self._w2[:0:-1]:
            acc = acc * R + wk
        bound = np.abs(dG) * r + 0.5 * r * r * acc
        return G.real, bound


def field_raster(sample: GaussianFieldSample, box_radius: float, h: float):
    """Raster of {g < 0} on [-R, R]^2 with cells outside |z| < R left empty."""
    if box_radius > MAX_EVAL_RADIUS:
        raise ValueError(f"box radius must be <= {MAX_EVAL_RADIUS}")
    return rasterize_field(GaussianField(sample), Box.square(box_radius), h, mask_radius=box_radius)


def limit_inradius_sample(K_truncation: int = 500, box_radius: float = 0.98, h: float = 0.005,
                          seed=None) -> float:
    """One draw of the inradius of {g < 0}, rasterized inside the disk of ``box_radius``."""
    g = sample_g(K_truncation, seed)
    return inradius_estimate(field_raster(g, box_radius, h)).rho_hat
