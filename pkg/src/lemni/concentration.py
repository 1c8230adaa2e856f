"""Bennett's inequality and a Monte Carlo check of the pointwise containment tail.

Bennett: if X_1..X_n are independent with X_i <= b a.s., S = sum (X_i - E X_i)
and nu = sum E X_i^2, then P(S > t) <= exp(-(nu/b^2) h(b t / nu)) with
h(u) = (1+u) log(1+u) - u.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .measures import UniformCircle, _draw, potential, variance_sigma2

# Y_k = log|z - X_k| is bounded above by log(|z| + R), which can be <= 0
# (e.g. z = 0 in the unit disk). Any positive b is then a valid bound and
# the Bennett exponent tends to t^2 / (2 nu) as b -> 0, so b is floored here.
MIN_B = 1e-12


def bennett_h(u: float) -> float:
    """h(u) = (1+u) log(1+u) - u for u >= 0."""
    u = float(u)
    if not u >= 0:
        raise ValueError(f"h is defined for u >= 0, got {u}")
    if u < 1e-3:
        return u * u * _h_over_u2_series(u)
    return (1 + u) * math.log1p(u) - u


def _h_over_u2_series(u: float) -> float:
    # h(u) / u^2 = sum_{k>=2} (-u)^(k-2) / (k (k-1))
    s = 0.0
    for k in range(12, 1, -1):
        s = s * (-u) + 1.0 / (k * (k - 1))
    return s


def _h_over_u2(u: float) -> float:
    if u < 1e-3:
        return _h_over_u2_series(u)
    return bennett_h(u) / (u * u)


@dataclass(frozen=True)
class BennettBound:
    nu: float
    b: float
    t: float
    bound: float


def bennett_bound(nu: float, b: float, t: float) -> BennettBound:
    """exp(-(nu/b^2) h(b t / nu)), written as exp(-(t^2/nu) h(u)/u^2) with u = b t / nu."""
    nu, b, t = float(nu), float(b), float(t)
    if not (nu > 0 and b > 0 and t > 0) or not all(map(math.isfinite, (nu, b, t))):
        raise ValueError(f"need finite positive nu, b, t; got {nu}, {b}, {t}")
    u = b * t / nu
    exponent = (t * t / nu) * _h_over_u2(u)
    return BennettBound(nu, b, t, math.exp(-exponent))


def verify_containment_bound(measure, z, n: int, trials: int = 10_000, seed=None,
                             sigma_samples: int = 100_000) -> dict:
    """Compare the empirical P{log|p_n(z)| > -log 2} with its Bennett bound.

    Needs a strictly negative closed-form potential at z.
    """
    z = complex(z)
    if trials < 100:
        raise ValueError("need at least 100 trials")
    if isinstance(measure, UniformCircle):
        raise ValueError("the circle measure has no point with negative potential")
    U = potential(measure, z).value
    if not U < 0:
        raise ValueError(f"potential at z={z} is {U:.6g}, not negative")
    rng = np.random.default_rng(seed)
    s2 = variance_sigma2(measure, z, M=sigma_samples, seed=rng).value
    nu = n * s2
    b = max(math.log(abs(z) + measure.support_radius()), MIN_B)
    t = -n * U - math.log(2)
    bound = bennett_bound(nu, b, t).bound if t > 0 else 1.0

    hits = 0
    done = 0
    batch = max(1, 200_000 // n)
    while done < trials:
        m = min(batch, trials - done)
        X = _draw(measure, (m, n), rng)
        vals = np.log(np.abs(z - X)).sum(axis=1)
        hits += int(np.count_nonzero(vals > -math.log(2)))
        done += m
    emp = hits / trials
    stderr = math.sqrt(max(emp * (1 - emp), 1.0 / trials) / trials)
    return {
        "empirical": emp,
        "bound": bound,
        "nu": nu,
        "b": b,
        "t": t,
        "trials": trials,
        "pass": bool(emp <= bound + 3 * stderr),
    }


def bounded_iid_check(n: int = 100, trials: int = 100_000, t_values=(2, 5, 10, 20),
                      seed=None) -> list[dict]:
    """Tails of sums of n uniforms on [-1, 1] against Bennett with b = 1, nu = n/3."""
    rng = np.random.default_rng(seed)
    S = np.zeros(trials)
    for s in range(0, trials, 10_000):
        S[s:s + 10_000] = rng.uniform(-1, 1, (min(10_000, trials - s), n)).sum(axis=1)
    nu = n / 3.0
    out = []
    for t in t_values:
        emp = float(np.mean(S > t))
        se = math.sqrt(max(emp * (1 - emp), 1.0 / trials) / trials)
        bb = bennett_bound(nu, 1.0, t)
        out.append({**asdict(bb), "empirical": emp, "stderr": se,
                    "pass": bool(emp <= bb.bound + 3 * se)})
    return out
