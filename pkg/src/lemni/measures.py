"""Sampling measures for polynomial zeros and their logarithmic potentials.

Four laws are supported: the normalized area measure on a disk of radius
``r``, the uniform measure on the unit circle, the normalized Ginibre
spectrum (whose potential is taken in the circular-law limit) and an
empirical measure on a finite point set.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

logger = logging.getLogger(__name__)

SQRT_E = math.sqrt(math.e)


class UnsupportedMeasureError(ValueError):
    """Raised when a closed form is requested for a measure that has none."""


@dataclass(frozen=True)
class UniformDisk:
    radius: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"disk radius must be positive, got {self.radius}")

    def support_radius(self) -> float:
        return float(self.radius)

    def __str__(self):
        return f"disk:{self.radius:g}"


@dataclass(frozen=True)
class UniformCircle:
    def support_radius(self) -> float:
        return 1.0

    def __str__(self):
        return "circle"


@dataclass(frozen=True)
class GinibreNormalized:
    """Eigenvalues of an n x n Ginibre matrix divided by sqrt(n).

    Finite-n spectra can leave the unit disk; ``support_radius`` reports the
    circular-law support, callers building windows should also look at the
    realized zeros.
    """

    def support_radius(self) -> float:
        return 1.0

    def __str__(self):
        return "ginibre"


@dataclass(frozen=True)
class Empirical:
    points: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).ravel()
        if pts.size == 0:
            raise ValueError("empirical measure needs at least one point")
        if not np.all(np.isfinite(pts)):
            raise ValueError("empirical points must be finite")
        object.__setattr__(self, "points", pts)

    def support_radius(self) -> float:
        return float(np.max(np.abs(self.points)))

    def __str__(self):
        return f"empirical[{self.points.size}]"

    def __eq__(self, other):
        return isinstance(other, Empirical) and np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash(self.points.tobytes())


MeasureSpec = Union[UniformDisk, UniformCircle, GinibreNormalized, Empirical]


@dataclass(frozen=True)
class PotentialValue:
    """A potential (or second moment) value in nats.

    ``stderr`` is zero exactly when the value comes from a closed form.
    """

    value: float
    stderr: float
    method: str  # "closed_form" | "monte_carlo"

    def __post_init__(self):
        if self.method not in ("closed_form", "monte_carlo"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.stderr < 0:
            raise ValueError("stderr must be nonnegative")
        if self.method == "closed_form" and self.stderr != 0:
            raise ValueError("closed-form values carry no stderr")


def parse_measure(text: str) -> MeasureSpec:
    """Parse the measure mini-language: ``disk:R``, ``circle``, ``ginibre``, ``file:PATH``."""
    text = text.strip()
    if text == "circle":
        return UniformCircle()
    if text == "ginibre":
        return GinibreNormalized()
    if text.startswith("disk:"):
        return UniformDisk(float(text[5:]))
    if text.startswith("file:"):
        from .polynomial import load_zeros

        return Empirical(load_zeros(text[5:]).zeros)
    raise ValueError(f"cannot parse measure {text!r}")


def sample(measure: MeasureSpec, n: int, seed=None):
    """Draw ``n`` i.i.d. zeros from ``measure`` and wrap them in a ZeroSet."""
    from .polynomial import ZeroSet

    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    rng = np.random.default_rng(seed)
    if isinstance(measure, GinibreNormalized):
        from .ginibre import normalized_spectrum

        return normalized_spectrum(n, rng)
    return ZeroSet(_draw(measure, n, rng), provenance=measure)


def _draw(measure: MeasureSpec, size, rng: np.random.Generator) -> np.ndarray:
    if isinstance(measure, UniformDisk):
        # inverse-CDF radius, no rejection loop
        rad = measure.radius * np.sqrt(rng.random(size))
        ang = 2 * np.pi * rng.random(size)
        return rad * np.exp(1j * ang)
    if isinstance(measure, UniformCircle):
        return np.exp(2j * np.pi * rng.random(size))
    if isinstance(measure, Empirical):
        return measure.points[rng.integers(0, measure.points.size, size)]
    if isinstance(measure, GinibreNormalized):
        raise UnsupportedMeasureError("Ginibre zeros are not i.i.d.; use ginibre.normalized_spectrum")
    raise TypeError(f"not a measure: {measure!r}")


def _log_dist(measure: MeasureSpec, z: complex, w: np.ndarray) -> np.ndarray:
    if isinstance(measure, UniformCircle):
        # |z - w| = |1 - z conj(w)| on the unit circle; exact zero at z = 0
        return np.log(np.abs(1 - z * np.conj(w)))
    return np.log(np.abs(z - w))


def _closed_form_measure(measure: MeasureSpec) -> MeasureSpec:
    if isinstance(measure, GinibreNormalized):
        return UniformDisk(1.0)
    if isinstance(measure, Empirical):
        raise UnsupportedMeasureError("no closed form for an empirical measure; use potential_mc")
    return measure


def potential(measure: MeasureSpec, z: complex) -> PotentialValue:
    """Closed-form logarithmic potential at ``z``.

    GinibreNormalized uses its circular-law limit, the unit-disk measure.
    """
    measure = _closed_form_measure(measure)
    return PotentialValue(float(potential_array(measure, z)), 0.0, "closed_form")


def potential_array(measure: MeasureSpec, z) -> np.ndarray:
    """Vectorized closed-form potential; accepts any array of complex points."""
    measure = _closed_form_measure(measure)
    a = np.abs(np.asarray(z, dtype=complex))
    if isinstance(measure, UniformCircle):
        with np.errstate(divide="ignore"):
            return np.where(a > 1, np.log(np.maximum(a, 1.0)), 0.0)
    r = measure.radius
    inner = (a * a - r * r) / (2 * r * r) + math.log(r)
    with np.errstate(divide="ignore"):
        outer = np.log(np.maximum(a, r))
    return np.where(a < r, inner, outer)


def _mc_draws(measure, z, M, seed):
    if M < 100:
        raise ValueError(f"need M >= 100 samples, got {M}")
    rng = np.random.default_rng(seed)
    if isinstance(measure, GinibreNormalized):
        measure = UniformDisk(1.0)
    w = _draw(measure, M, rng)
    vals = _log_dist(measure, z, w)
    bad = ~np.isfinite(vals)
    while np.any(bad):
        logger.warning("resampling %d Monte Carlo points that coincide with z=%r", bad.sum(), z)
        w[bad] = _draw(measure, int(bad.sum()), rng)
        vals[bad] = _log_dist(measure, z, w[bad])
        bad = ~np.isfinite(vals)
    return vals


def _mean_with_stderr(vals: np.ndarray) -> PotentialValue:
    M = vals.size
    return PotentialValue(float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(M)), "monte_carlo")


def potential_mc(measure: MeasureSpec, z: complex, M: int = 100_000, seed=None) -> PotentialValue:
    """Monte Carlo estimate of the potential: mean of log|z - W| over M draws W ~ measure."""
    return _mean_with_stderr(_mc_draws(measure, complex(z), M, seed))


def variance_sigma2(measure: MeasureSpec, z: complex, M: int = 100_000, seed=None) -> PotentialValue:
    """Monte Carlo estimate of the second moment of log|z - W|, W ~ measure."""
    vals = _mc_draws(measure, complex(z), M, seed)
    return _mean_with_stderr(vals * vals)


def negative_set_inradius(measure: MeasureSpec) -> float:
    """Inradius r_c of the set where the potential is negative.

    For the disk family this set is the centered disk of radius r_c, which is
    1 for r <= 1, r*sqrt(1 - 2 log r) for 1 <= r <= sqrt(e), and 0 beyond.
    """
    if isinstance(measure, (UniformCircle, GinibreNormalized)):
        return 1.0
    if isinstance(measure, Empirical):
        raise UnsupportedMeasureError("r_c is only available in closed form")
    r = float(measure.radius)
    if r <= 1.0:
        return 1.0
    if r >= SQRT_E:
        return 0.0
    return r * math.sqrt(max(0.0, 1.0 - 2.0 * math.log(r)))


def distance_to_support(measure: MeasureSpec, center: complex, radius: float) -> float:
    """Distance between the circle |z - center| = radius and the support of ``measure``."""
    c = abs(complex(center))
    if isinstance(measure, Empirical):
        return float(np.min(np.abs(np.abs(measure.points - center) - radius)))
    lo, hi = abs(c - radius), c + radius  # range of |z| over the circle
    if isinstance(measure, UniformCircle):
        if lo <= 1.0 <= hi:
            return 0.0
        return min(abs(lo - 1.0), abs(hi - 1.0))
    R = measure.support_radius()
    return max(0.0, lo - R)
