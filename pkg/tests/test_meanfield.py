import math

import pytest
from hypothesis import given, settings, strategies as st

from edugrowth.meanfield import calibrate, mf_fixed_point, mf_iterate, mf_step


def test_step_fixed_point():
    assert mf_step(1.0, 1.0, 2 / 400, 400) == 1.0


def test_step_zero_absorbs():
    assert mf_step(0.0, 3.0, 0.01, 400) == 0.0


def test_step_hand_value():
    assert mf_step(0.5, 0.5, 0.005, 400) == pytest.approx(2 * (2 / 1.5) * 0.5 / 2)
    with pytest.raises(ValueError):
        mf_step(-1.0, 0.5, 0.005, 400)


def test_fixed_point_baseline():
    fp = mf_fixed_point(0.005, 400, alpha_prime=0.45, delta=0.011)
    assert fp.r == pytest.approx(1.0, abs=1e-12)
    assert fp.u == pytest.approx(200.0, abs=1e-12)
    assert fp.s_s == pytest.approx(100.0, abs=1e-12)
    assert fp.w == pytest.approx(1 / 0.45, abs=1e-12)
    assert fp.growth == pytest.approx(1.1, abs=1e-12)


def test_fixed_point_boundary():
    fp = mf_fixed_point(1 / 400, 400, alpha_prime=0.45)
    assert fp.r == pytest.approx(0.0, abs=1e-12)
    assert fp.s_s == pytest.approx(0.0, abs=1e-12)


def test_fixed_point_below_threshold_is_trivial():
    fp = mf_fixed_point(0.001, 400, alpha_prime=0.45)
    assert fp.r == 0.0 and fp.s_s == 0.0 and fp.u == 400


def test_fixed_point_by_iteration():
    fp = mf_fixed_point(0.004, 400, alpha_prime=0.45)
    assert (fp.r, fp.u, fp.s_s) == pytest.approx((0.6, 250.0, 75.0))
    r, _, ok = mf_iterate(0.004, 400, 0.2)
    assert ok and r == pytest.approx(0.6, abs=1e-10)


def test_fixed_point_needs_a_parameter():
    with pytest.raises(ValueError):
        mf_fixed_point(0.005, 400)
    with pytest.raises(ValueError):
        mf_fixed_point(0.0, 400, delta=0.01)


@settings(max_examples=100, deadline=None)
@given(st.floats(1.05, 5.0), st.floats(0.01, 0.99), st.sampled_from([100, 400, 1600]))
def test_iteration_converges(lam_n, frac, n):
    lam = lam_n / n
    r_star = lam * n - 1
    r0 = frac * 10 * r_star
    r, _, ok = mf_iterate(lam, n, r0)
    assert ok
    assert r == pytest.approx(r_star, abs=1e-9)
    assert abs(mf_step(r_star, r_star, lam, n) - r_star) <= 1e-12 * max(1.0, r_star)


def test_calibration_baseline():
    cal = calibrate(0.03, 25, 200, 400)
    assert cal.delta == pytest.approx(0.010938, abs=1e-6)
    assert cal.alpha_prime == pytest.approx(0.4571, abs=1e-4)
    assert cal.lam == pytest.approx(0.005)
    assert cal.growth == pytest.approx(1.0938, abs=1e-4)


def test_calibration_edge():
    cal = calibrate(0.03, 25, 399, 400)
    assert cal.delta == pytest.approx(cal.growth / 0.5)
    assert cal.delta == pytest.approx(2.1876, abs=1e-4)


@pytest.mark.parametrize("args", [(0.0, 25, 200, 400), (0.03, 25, 400, 400), (0.03, 25, 0, 400)])
def test_calibration_rejects(args):
    with pytest.raises(ValueError):
        calibrate(*args)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.001, 0.1), st.floats(1, 40), st.floats(0.05, 0.95))
def test_calibration_round_trip(g, years, u_frac):
    n = 400
    u_star = u_frac * n
    cal = calibrate(g, years, u_star, n)
    fp = mf_fixed_point(cal.lam, n, alpha_prime=cal.alpha_prime)
    assert fp.u == pytest.approx(u_star, rel=1e-12)
    assert fp.growth == pytest.approx(cal.growth, rel=1e-12)
    assert math.isclose(cal.delta * cal.alpha_prime, cal.lam, rel_tol=1e-12)


def test_unskilled_share_independent_of_n():
    u = {n: mf_fixed_point(0.005, n, alpha_prime=0.45).u for n in (400, 1600, 6400)}
    assert len(set(u.values())) == 1
