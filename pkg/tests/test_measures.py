import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, optimize

from lemni.measures import (
    Empirical,
    GinibreNormalized,
    PotentialValue,
    UniformCircle,
    UniformDisk,
    UnsupportedMeasureError,
    distance_to_support,
    negative_set_inradius,
    parse_measure,
    potential,
    potential_array,
    potential_mc,
    sample,
    variance_sigma2,
)


def disk_potential_quad(r, z):
    """Oracle: integrate log|z - w| over the disk in polar coordinates."""
    f = lambda t, s: math.log(abs(z - s * np.exp(1j * t)) + 1e-300) * s / (math.pi * r * r)
    val, _ = integrate.dblquad(f, 0, r, 0, 2 * math.pi, epsabs=1e-10)
    return val


def test_disk_potential_at_center():
    assert potential(UniformDisk(1.0), 0).value == -0.5


@pytest.mark.parametrize("r,z", [(1.0, 0.3), (0.5, 0.2 + 0.1j), (1.7, 1.0j), (0.4, 2.0)])
def test_disk_potential_matches_quadrature(r, z):
    assert potential(UniformDisk(r), z).value == pytest.approx(disk_potential_quad(r, z), abs=1e-7)


def test_potential_outside_is_log_modulus():
    assert potential(UniformDisk(0.7), 3 + 4j).value == pytest.approx(math.log(5))


def test_potential_continuous_at_rim():
    r = 1.3
    a = potential(UniformDisk(r), r * (1 - 1e-12)).value
    b = potential(UniformDisk(r), r * (1 + 1e-12)).value
    assert a == pytest.approx(b, abs=1e-10)


def test_circle_potential_is_log_plus():
    assert potential(UniformCircle(), 0.5).value == 0.0
    assert potential(UniformCircle(), 2.0).value == pytest.approx(math.log(2))


def test_ginibre_uses_unit_disk():
    assert potential(GinibreNormalized(), 0.3).value == potential(UniformDisk(1), 0.3).value


def test_empirical_has_no_closed_form():
    with pytest.raises(UnsupportedMeasureError):
        potential(Empirical(np.array([0.1, 0.2])), 0)


def test_potential_mc_agrees_with_closed_form():
    m = UniformDisk(1.2)
    pv = potential_mc(m, 0.4 + 0.3j, M=50_000, seed=5)
    assert pv.method == "monte_carlo"
    assert abs(pv.value - potential(m, 0.4 + 0.3j).value) < 4 * pv.stderr


def test_mc_requires_enough_samples():
    with pytest.raises(ValueError):
        potential_mc(UniformDisk(1), 0, M=50)


def test_circle_mc_exact_at_origin():
    pv = potential_mc(UniformCircle(), 0, M=1000, seed=1)
    assert pv.value == 0.0 and pv.stderr == 0.0


def test_sigma2_disk_center():
    # int_0^1 2s log(s)^2 ds = 1/2
    pv = variance_sigma2(UniformDisk(1), 0, M=200_000, seed=2)
    assert abs(pv.value - 0.5) < 4 * pv.stderr


def test_sigma2_against_quadrature():
    r, z = 1.5, 0.6
    f = lambda t, s: math.log(abs(z - s * np.exp(1j * t)) + 1e-300) ** 2 * s / (math.pi * r * r)
    oracle, _ = integrate.dblquad(f, 0, r, 0, 2 * math.pi, epsabs=1e-9)
    pv = variance_sigma2(UniformDisk(r), z, M=200_000, seed=3)
    assert abs(pv.value - oracle) < 4 * pv.stderr


def test_potential_value_invariants():
    with pytest.raises(ValueError):
        PotentialValue(1.0, 0.1, "closed_form")
    with pytest.raises(ValueError):
        PotentialValue(1.0, -1.0, "monte_carlo")
    with pytest.raises(ValueError):
        PotentialValue(1.0, 0.0, "guess")


def rc_bisection(r):
    """Oracle: root of the closed-form potential along the real axis."""
    if r <= 1:
        return 1.0
    if r >= math.sqrt(math.e):
        return 0.0
    U = lambda a: (a * a - r * r) / (2 * r * r) + math.log(r)
    return optimize.brentq(U, 0.0, r, xtol=1e-14)


@pytest.mark.parametrize("r", np.linspace(1.0, math.sqrt(math.e), 17))
def test_rc_matches_bisection(r):
    assert negative_set_inradius(UniformDisk(r)) == pytest.approx(rc_bisection(r), abs=1e-8)


def test_rc_exact_values():
    assert negative_set_inradius(UniformDisk(0.5)) == 1.0
    assert negative_set_inradius(UniformDisk(math.sqrt(math.e))) == 0.0
    assert negative_set_inradius(UniformDisk(1.5)) == pytest.approx(0.652, abs=1e-3)


def test_rc_continuous_at_one():
    assert negative_set_inradius(UniformDisk(1 + 1e-12)) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("text,expected", [
    ("disk:1.5", UniformDisk(1.5)),
    ("circle", UniformCircle()),
    ("ginibre", GinibreNormalized()),
])
def test_parse_measure(text, expected):
    m = parse_measure(text)
    assert m == expected
    assert parse_measure(str(m)) == m


def test_parse_measure_file(tmp_path):
    p = tmp_path / "z.txt"
    p.write_text("0.5 0\n0 -0.25\n")
    m = parse_measure(f"file:{p}")
    assert isinstance(m, Empirical)
    assert m.support_radius() == 0.5


@pytest.mark.parametrize("bad", ["disk:-1", "square", "disk:x"])
def test_parse_measure_rejects(bad):
    with pytest.raises(ValueError):
        parse_measure(bad)


@settings(max_examples=30, deadline=None)
@given(r=st.floats(0.1, 3.0), n=st.integers(1, 200), seed=st.integers(0, 2**32))
def test_disk_samples_stay_in_support(r, n, seed):
    Z = sample(UniformDisk(r), n, seed)
    assert Z.n == n
    assert np.all(np.abs(Z.zeros) <= r)


def test_circle_samples_on_circle():
    Z = sample(UniformCircle(), 100, 0)
    assert np.allclose(np.abs(Z.zeros), 1.0)


def test_sample_reproducible():
    a = sample(UniformDisk(1), 50, 9).zeros
    b = sample(UniformDisk(1), 50, 9).zeros
    assert np.array_equal(a, b)


def test_sample_rejects_bad_n():
    with pytest.raises(ValueError):
        sample(UniformDisk(1), 0, 1)


def test_ginibre_sample_is_spectrum():
    Z = sample(GinibreNormalized(), 20, 3)
    assert Z.n == 20 and isinstance(Z.provenance, GinibreNormalized)


def test_disk_samples_are_area_uniform():
    Z = sample(UniformDisk(2.0), 40_000, 4).zeros
    # P(|X| < 1) = 1/4
    frac = np.mean(np.abs(Z) < 1)
    assert abs(frac - 0.25) < 4 * math.sqrt(0.25 * 0.75 / Z.size)


@settings(max_examples=50, deadline=None)
@given(r=st.floats(0.2, 3.0), x=st.floats(-4, 4), y=st.floats(-4, 4))
def test_potential_array_matches_scalar(r, x, y):
    z = complex(x, y)
    assert potential_array(UniformDisk(r), np.array([z]))[0] == potential(UniformDisk(r), z).value


def test_distance_to_support():
    assert distance_to_support(UniformDisk(1), 0, 1.5) == pytest.approx(0.5)
    assert distance_to_support(UniformDisk(1), 0, 0.5) == 0.0
    assert distance_to_support(UniformCircle(), 0, 1.5) == pytest.approx(0.5)
    assert distance_to_support(UniformCircle(), 0, 0.7) == pytest.approx(0.3)
    assert distance_to_support(UniformCircle(), 0.5, 0.7) == 0.0
