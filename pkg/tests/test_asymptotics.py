import math

import numpy as np
import pytest
from scipy import integrate

from threshsel.asymptotics import (
    TAIL_CSV_HEADER,
    chi2_tail,
    chi2_tail_inverse,
    distribution_identity_test,
    log_tail_approx,
    threshold_law_check,
    uniform_order_check,
    uniform_order_samples,
)
from threshsel.core import SeedSpec


def chi2_1_density(x):
    return math.exp(-x / 2) / math.sqrt(2 * math.pi * x)


def tail_by_quadrature(t):
    val, _ = integrate.quad(chi2_1_density, t, np.inf, epsabs=1e-14, epsrel=1e-12)
    return val


@pytest.mark.parametrize("t", [3.841459, 6.634897, 0.5, 12.0, 30.0])
def test_chi2_tail_against_quadrature(t):
    assert chi2_tail(t) == pytest.approx(tail_by_quadrature(t), abs=1e-12)


def test_chi2_tail_reference_points():
    assert chi2_tail(0.0) == 1.0
    assert chi2_tail(3.841459) == pytest.approx(0.05, abs=1e-6)
    assert chi2_tail(6.634897) == pytest.approx(0.01, abs=1e-6)
    with pytest.raises(ValueError):
        chi2_tail(-1e-3)


def test_chi2_tail_strictly_decreasing():
    t = np.linspace(0, 60, 5001)
    assert np.all(np.diff(chi2_tail(t)) < 0)


def test_inverse_reference_points():
    assert chi2_tail_inverse(1.0) == 0.0
    assert chi2_tail_inverse(0.05) == pytest.approx(3.841459, abs=1e-6)
    # invert the quadrature oracle independently by bisection
    lo, hi = 0.0, 20.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if tail_by_quadrature(mid) > 0.01 else (lo, mid)
    assert chi2_tail_inverse(0.01) == pytest.approx(lo, abs=1e-8)


def test_inverse_round_trip_log_grid():
    u = np.logspace(-12, 0, 1201)
    t = chi2_tail_inverse(u)
    assert np.max(np.abs(chi2_tail(t) - u)) <= 1e-9
    assert np.all(np.diff(t) < 0)


def test_inverse_scalar_and_domain():
    assert isinstance(chi2_tail_inverse(0.3), float)
    for bad in (0.0, -0.1, 1.5, math.nan):
        with pytest.raises(ValueError):
            chi2_tail_inverse(bad)


def test_log_tail_approx():
    assert log_tail_approx(math.exp(-2)) == pytest.approx(4.0)
    assert log_tail_approx(0.05) == pytest.approx(5.9915, abs=1e-4)
    ratio = chi2_tail_inverse(1e-4) / log_tail_approx(1e-4)
    assert ratio == pytest.approx(0.82, abs=0.005)
    with pytest.raises(ValueError):
        log_tail_approx(1.0)


def test_uniform_order_check_against_beta_mean():
    n, k = 1000, 9
    exact = n * (k + 1) / (n + 1)
    got = uniform_order_check(n, k, 2000, SeedSpec(1))
    assert 9.5 <= got <= 10.5
    # nU_(k+1) has sd about sqrt(k+1) = 3.2; 2000 replicas give se about 0.07
    assert got == pytest.approx(exact, abs=0.35)


def test_uniform_order_check_top():
    n = 50
    exact = n * n / (n + 1)
    got = uniform_order_check(n, n - 1, 4000, SeedSpec(2))
    assert got < n
    assert got == pytest.approx(exact, abs=0.1)


def test_uniform_order_check_deterministic():
    a = uniform_order_check(100, 3, 1, SeedSpec(5))
    b = uniform_order_check(100, 3, 1, SeedSpec(5))
    assert a == b
    assert uniform_order_samples(100, 3, 10, SeedSpec(5), threads=3).tolist() == uniform_order_samples(
        100, 3, 10, SeedSpec(5)
    ).tolist()


def test_range_errors():
    with pytest.raises(ValueError):
        uniform_order_check(10, 10, 5, SeedSpec(0))
    with pytest.raises(ValueError):
        threshold_law_check(10, 3, 0, 1.0, SeedSpec(0))


def test_threshold_law_check_point():
    rep = threshold_law_check(4096, 15, 400, 1.0, SeedSpec(3))
    assert rep.plug_in == pytest.approx(chi2_tail_inverse(16 / 4096))
    assert rep.plug_in == pytest.approx(8.33, abs=0.01)
    assert rep.plug_in_rel_error <= 0.10
    assert rep.log_approx == pytest.approx(2 * math.log(256))
    assert 0.70 <= rep.log_ratio <= 0.80
    assert TAIL_CSV_HEADER == ("n", "k", "replicas", "mc_mean", "plug_in", "log_approx")
    assert rep.to_row()[:3] == (4096, 15, 400)


def test_threshold_law_scale_free():
    a = threshold_law_check(512, 7, 20, 1.0, SeedSpec(4))
    b = threshold_law_check(512, 7, 20, 4.0, SeedSpec(4))
    assert a.mc_mean == b.mc_mean


def test_distribution_identity_small():
    res = distribution_identity_test(128, 3, 1000, SeedSpec(6))
    assert res.pvalue > 0.001
