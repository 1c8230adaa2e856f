import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lemni.concentration import bennett_bound, bennett_h, bounded_iid_check, verify_containment_bound
from lemni.measures import UniformCircle, UniformDisk


def test_h_values():
    assert bennett_h(0) == 0.0
    assert bennett_h(1) == pytest.approx(2 * math.log(2) - 1, rel=1e-15)
    assert bennett_h(0.5) == pytest.approx(1.5 * math.log(1.5) - 0.5, rel=1e-15)


@pytest.mark.parametrize("u", [1e-8, 1e-5, 5e-4, 2e-3])
def test_h_small_u_series(u):
    series = u * u / 2 - u ** 3 / 6 + u ** 4 / 12 - u ** 5 / 20
    assert bennett_h(u) == pytest.approx(series, rel=1e-9)


@pytest.mark.parametrize("u", [0.1, 1, 10])
def test_h_above_bernstein_minorant(u):
    assert bennett_h(u) >= u * u / (2 + 2 * u / 3)


def test_h_domain():
    with pytest.raises(ValueError):
        bennett_h(-0.1)


def test_bound_example():
    b = bennett_bound(100, 1, 50)
    assert b.bound == pytest.approx(math.exp(-100 * (1.5 * math.log(1.5) - 0.5)), rel=1e-12)
    assert b.bound == pytest.approx(2.0e-5, rel=1e-3)


def test_bound_tends_to_one():
    assert bennett_bound(50, 1, 1e-9).bound == pytest.approx(1.0)


def test_bound_small_b_limit():
    # b -> 0 gives exp(-t^2 / (2 nu))
    assert bennett_bound(25, 1e-12, 10).bound == pytest.approx(math.exp(-2), rel=1e-9)


def test_bound_domain():
    for args in [(0, 1, 1), (1, 0, 1), (1, 1, 0), (1, 1, math.inf)]:
        with pytest.raises(ValueError):
            bennett_bound(*args)


@settings(max_examples=200, deadline=None)
@given(nu=st.floats(1e-3, 1e4), b=st.floats(1e-3, 1e2), t=st.floats(1e-3, 1e3))
def test_bound_in_unit_interval_and_decreasing(nu, b, t):
    one = bennett_bound(nu, b, t).bound
    two = bennett_bound(nu, b, 2 * t).bound
    assert 0 <= one <= 1
    assert two <= one
    if one > 1e-300 and one < 1:
        assert two < one


def test_bounded_iid_tails():
    rows = bounded_iid_check(n=100, trials=100_000, seed=11)
    assert [r["t"] for r in rows] == [2, 5, 10, 20]
    assert all(r["pass"] for r in rows)


def test_containment_bound_disk_center():
    rep = verify_containment_bound(UniformDisk(1), 0, 50, 10_000, seed=1)
    assert set(rep) == {"empirical", "bound", "nu", "b", "t", "trials", "pass"}
    assert rep["pass"]
    assert rep["t"] == pytest.approx(25 - math.log(2))


def test_containment_frequency_falls_with_n():
    small = verify_containment_bound(UniformDisk(1), 0, 5, 10_000, seed=2)
    big = verify_containment_bound(UniformDisk(1), 0, 50, 10_000, seed=2)
    assert big["empirical"] < small["empirical"]


def test_containment_preconditions():
    with pytest.raises(ValueError):
        verify_containment_bound(UniformCircle(), 0.99, 50, 1000)
    with pytest.raises(ValueError):
        verify_containment_bound(UniformDisk(2.0), 0, 50, 1000)  # U(0) = log 2 - 1/2 > 0
    with pytest.raises(ValueError):
        verify_containment_bound(UniformDisk(1), 0, 50, 10)
