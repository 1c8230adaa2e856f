"""Evaluation of log|p_n| for p_n(z) = prod (z - X_k) and certified bounds on circles.

Everything works from the zero set directly (sums of logs, never expanded
coefficients), which keeps evaluation stable for degrees in the thousands.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Floating slack per zero added to every certified bound. The bounds are
# rigorous in exact arithmetic; this is the only allowance for rounding.
FLOAT_SLACK = 1e-12
MIN_CIRCLE_DISTANCE = 1e-9
MAX_NET = 2**20
_CHUNK = 1 << 22  # max (points x zeros) pairs held in memory at once


class CoincidentPointError(ValueError):
    pass


class ZeroOnCircleError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ZeroSet:
    """The zeros X_1..X_n of a monic polynomial, n >= 1."""

    zeros: np.ndarray
    provenance: object = "explicit"

    def __post_init__(self):
        z = np.array(self.zeros, dtype=complex).ravel()
        if z.size < 1:
            raise ValueError("a ZeroSet needs at least one zero")
        if not np.all(np.isfinite(z)):
            raise ValueError("zeros must be finite")
        z.setflags(write=False)
        object.__setattr__(self, "zeros", z)

    @property
    def n(self) -> int:
        return self.zeros.size

    def __len__(self):
        return self.zeros.size

    def __array__(self, dtype=None, copy=None):
        return self.zeros if dtype is None else self.zeros.astype(dtype)


def as_zeros(zeros) -> np.ndarray:
    if isinstance(zeros, ZeroSet):
        return zeros.zeros
    return ZeroSet(zeros).zeros


def roots_of_unity(n: int, scale: float = 1.0) -> ZeroSet:
    k = np.arange(n)
    return ZeroSet(scale * np.exp(2j * np.pi * k / n), provenance=f"roots-of-unity:{n}")


def save_zeros(zeros, path) -> None:
    """Write one zero per line as ``re im``."""
    z = as_zeros(zeros)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(f"{float(w.real)!r} {float(w.imag)!r}\n" for w in z))


def load_zeros(path) -> ZeroSet:
    pts = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        re_, im_ = line.split()
        pts.append(complex(float(re_), float(im_)))
    return ZeroSet(np.array(pts), provenance=f"file:{path}")


def parse_zeros(text: str) -> ZeroSet:
    """Parse the zero-set mini-language: ``roots-of-unity:N``, ``origin:N``, ``file:PATH``."""
    kind, _, arg = text.partition(":")
    if kind == "roots-of-unity":
        return roots_of_unity(int(arg))
    if kind == "origin":
        return ZeroSet(np.zeros(int(arg), complex), provenance=text)
    if kind == "file":
        return load_zeros(arg)
    raise ValueError(f"cannot parse zero set {text!r}")


def log_modulus(zeros, z):
    """Sum of log|z - X_k|; -inf where z hits a zero exactly.

    Accepts a scalar or an array of points and returns the same shape.
    """
    X = as_zeros(zeros)
    zz = np.asarray(z, dtype=complex)
    flat = zz.ravel()
    out = np.empty(flat.shape, dtype=float)
    step = max(1, _CHUNK // X.size)
    with np.errstate(divide="ignore"):
        for s in range(0, flat.size, step):
            d = np.abs(flat[s:s + step, None] - X[None, :])
            out[s:s + step] = np.log(d).sum(axis=1)
    if zz.ndim == 0:
        return float(out[0])
    return out.reshape(zz.shape)


def log_gradient(zeros, z: complex) -> complex:
    """Sum of 1/(z - X_k), i.e. p'/p.

    Its modulus is the gradient norm of log|p_n| at z.
    """
    X = as_zeros(zeros)
    d = complex(z) - X
    if np.min(np.abs(d)) < 1e-300:
        raise CoincidentPointError(f"z={z!r} coincides with a zero")
    return complex(np.sum(1.0 / d))


@dataclass(frozen=True)
class _NetBound:
    bound: float
    net_size: int
    net_extreme: float
    lipschitz: float
    spacing: float
    finest_extreme: float


def _circle_net(center, radius, N):
    theta = 2 * np.pi * np.arange(N) / N
    return complex(center) + radius * np.exp(1j * theta)


def _net_bound(X, center, radius, N, upper: bool) -> _NetBound:
    """Net bound on one circle, tightest over the dyadic coarsenings of an N-point net.

    Every point of the circle lies within arc length s/2 (s = 2 pi R / N) of a
    net point w_j, so |z - X_k| >= |w_j - X_k| - s/2 on that arc and log|p_n|
    moves by at most L_j * s/2 with L_j = sum_k 1/(|w_j - X_k| - s/2). This L_j
    never exceeds the global n/d_min; the reported Lipschitz constant is
    max_j L_j.  Nets N, N/2, N/4, ... are nested, so taking the best level
    makes the bound monotone under doubling.
    """
    pts = _circle_net(center, radius, N)
    n = X.size
    vals = np.empty(N)
    dmin_pt = np.empty(N)
    step = max(1, _CHUNK // n)
    for s in range(0, N, step):
        d = np.abs(pts[s:s + step, None] - X[None, :])
        vals[s:s + step] = np.log(d).sum(axis=1)
        dmin_pt[s:s + step] = d.min(axis=1)

    finest = float(vals.max() if upper else vals.min())
    best = None
    level = N
    stride = 1
    while level >= 8:
        spacing = 2 * np.pi * radius / level
        idx = slice(None, None, stride)
        half = spacing / 2
        if np.min(dmin_pt[idx]) <= half:
            L = math.inf
        else:
            Lj = np.empty(level)
            sub = pts[idx]
            for s in range(0, level, step):
                d = np.abs(sub[s:s + step, None] - X[None, :])
                Lj[s:s + step] = np.sum(1.0 / (d - half), axis=1)
            L = float(Lj.max())
        ext = float(vals[idx].max() if upper else vals[idx].min())
        slack = n * FLOAT_SLACK
        if upper:
            b = ext + L * half + slack
        else:
            b = ext - L * half - slack
        cand = _NetBound(b, level, ext, L, spacing, finest)
        if best is None or (b < best.bound if upper else b > best.bound):
            best = cand
        if level % 2:
            break
        level //= 2
        stride *= 2
    return best


def _check_circle(X, center, radius, num_points):
    if num_points < 8:
        raise ValueError("need at least 8 net points")
    if not radius > 0:
        raise ValueError("radius must be positive")
    d_min = float(np.min(np.abs(np.abs(X - complex(center)) - radius)))
    if d_min < MIN_CIRCLE_DISTANCE:
        raise ZeroOnCircleError(f"a zero lies within {d_min:.3g} of the circle")
    return d_min


def sup_bound_on_circle(zeros, center, radius, num_points=1024) -> float:
    """Rigorous upper bound on max of log|p_n| over the circle |z - center| = radius."""
    X = as_zeros(zeros)
    _check_circle(X, center, radius, num_points)
    return _net_bound(X, center, radius, int(num_points), upper=True).bound


def inf_bound_on_circle(zeros, center, radius, num_points=1024) -> float:
    """Rigorous lower bound on min of log|p_n| over the circle |z - center| = radius."""
    X = as_zeros(zeros)
    _check_circle(X, center, radius, num_points)
    return _net_bound(X, center, radius, int(num_points), upper=False).bound


@dataclass(frozen=True)
class DiskCertificate:
    center: complex
    radius: float
    net_size: int
    net_max_log_modulus: float
    lipschitz_bound: float
    margin: float
    verdict: str  # certified_inside | certified_outside | inconclusive
    reason: str = ""

    @property
    def inside(self) -> bool:
        return self.verdict == "certified_inside"

    def to_dict(self) -> dict:
        return {
            "center": [self.center.real, self.center.imag],
            "radius": self.radius,
            "net_size": self.net_size,
            "net_max_log_modulus": self.net_max_log_modulus,
            "lipschitz_bound": self.lipschitz_bound,
            "margin": self.margin,
            "verdict": self.verdict,
            "reason": self.reason,
        }


def certify_disk(zeros, center, radius, initial_points=64, max_points=MAX_NET) -> DiskCertificate:
    """Decide whether the closed disk D(center, radius) lies in {|p_n| < 1}.

    ``certified_inside`` means the net bound proves max log|p_n| < 0 on the
    boundary circle, hence on the whole disk by the maximum principle.
    ``certified_outside`` means some net point already has |p_n| >= 1.
    """
    X = as_zeros(zeros)
    center = complex(center)
    radius = float(radius)
    nan = math.nan
    if not (radius > 0 and math.isfinite(radius) and np.isfinite(center)):
        return DiskCertificate(center, radius, 0, nan, nan, nan, "inconclusive", "degenerate disk")
    d_min = float(np.min(np.abs(np.abs(X - center) - radius)))
    if d_min < MIN_CIRCLE_DISTANCE:
        return DiskCertificate(center, radius, 0, nan, nan, nan, "inconclusive",
                               "zero on the boundary circle")
    N = max(8, int(initial_points))
    slack = X.size * FLOAT_SLACK
    nb = None
    while N <= max_points:
        nb = _net_bound(X, center, radius, N, upper=True)
        if nb.bound < 0:
            return DiskCertificate(center, radius, nb.net_size, nb.net_extreme, nb.lipschitz,
                                   -nb.bound, "certified_inside")
        if nb.finest_extreme - slack >= 0:
            return DiskCertificate(center, radius, nb.net_size, nb.net_extreme, nb.lipschitz,
                                   -nb.bound, "certified_outside",
                                   "a boundary point has |p| >= 1")
        N *= 2
    return DiskCertificate(center, radius, nb.net_size, nb.net_extreme, nb.lipschitz,
                           -nb.bound, "inconclusive", f"net cap {max_points} reached")


@dataclass(frozen=True)
class CircleLowerBound:
    center: complex
    radius: float
    net_size: int
    bound: float
    verdict: str  # certified_positive | violated | inconclusive


def certify_circle_positive(zeros, center, radius, initial_points=64,
                            max_points=MAX_NET) -> CircleLowerBound:
    """Try to prove min log|p_n| > 0 on the circle |z - center| = radius.

    Doubles the net until the lower bound is positive or a net point already
    has |p_n| <= 1.
    """
    X = as_zeros(zeros)
    center = complex(center)
    d_min = float(np.min(np.abs(np.abs(X - center) - radius)))
    if not radius > 0 or d_min < MIN_CIRCLE_DISTANCE:
        return CircleLowerBound(center, radius, 0, -math.inf, "inconclusive")
    slack = X.size * FLOAT_SLACK
    N = max(8, int(initial_points))
    nb = None
    while N <= max_points:
        nb = _net_bound(X, center, radius, N, upper=False)
        if nb.bound > 0:
            return CircleLowerBound(center, radius, nb.net_size, nb.bound, "certified_positive")
        if nb.finest_extreme + slack <= 0:
            return CircleLowerBound(center, radius, N, nb.bound, "violated")
        N *= 2
    return CircleLowerBound(center, radius, nb.net_size, nb.bound, "inconclusive")
