import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from regularity.errors import OutOfDomain, TailTooLarge
from regularity.oscillation import (
    MatrixNorm,
    ball_mean,
    ball_means,
    dmo_test,
    ex2_identity_residual,
    ex2_leading_gap,
    matrix_mean_oscillation_at_zero,
    oscillation_curve,
    oscillation_lower_bound,
    period_oscillation_integrals,
    theta_mean_norm,
)
from regularity.moduli import dini_test
from regularity.profiles import RadialProfile, eval_g
from regularity.verdicts import Rule, Status


@pytest.mark.parametrize("n", [2, 3])
def test_ball_mean_of_constant(n):
    p = RadialProfile.const(0.3, n=n)
    assert ball_mean(p, n, math.exp(-5.0)) == pytest.approx(0.3, rel=1e-9)


def test_ball_mean_near_inner_edge_reports_tail():
    p = RadialProfile.const(0.3)
    with pytest.raises(TailTooLarge):
        ball_mean(p, 2, math.exp(-39.0))
    with pytest.raises(OutOfDomain):
        ball_mean(p, 2, math.exp(-45.0))


def test_ball_mean_of_power_profile_follows_its_expansion():
    gamma, n, t = 0.75, 2, 20.0
    p = RadialProfile.ex1(gamma)
    expansion = 1.0
    term = 1.0
    for k in range(1, 4):
        term *= -(gamma + k - 1) / (n * t)
        expansion += term
    assert ball_mean(p, n, math.exp(-t)) == pytest.approx(t ** -gamma * expansion, abs=2e-6)


@pytest.mark.parametrize("beta", [0.5, 0.75, 2.0])
@pytest.mark.parametrize("n", [2, 3])
def test_log_sine_leading_term(beta, n):
    t = 30.0
    assert ex2_leading_gap(beta, n, t) <= beta * t ** (-beta - 1.0) / math.sqrt(n ** 2 + 1) + 1e-9


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("t", [2.0, 5.0, 10.0, 30.0])
def test_log_sine_identity(beta, n, t):
    assert ex2_identity_residual(beta, n, t) < 1e-8


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("norm", list(MatrixNorm))
def test_oscillation_of_constant_profile(n, norm):
    c = 0.3
    p = RadialProfile.const(c, n=n)
    omega = matrix_mean_oscillation_at_zero(p, n, math.exp(-5.0), norm)
    assert omega == pytest.approx(c * theta_mean_norm(n, norm), rel=1e-9)
    if norm is MatrixNorm.SPECTRAL:
        assert omega == pytest.approx(c * (n - 1) / n, rel=1e-9)


def test_zero_profile_has_no_oscillation(zero2):
    assert matrix_mean_oscillation_at_zero(zero2, 2, math.exp(-5.0)) == 0.0
    curve = oscillation_curve(zero2)
    assert np.all(curve.omega_A == 0.0)
    assert np.all(curve.gtilde == 0.0)


def test_power_profile_oscillation_stays_positive():
    p = RadialProfile.ex1(1.0)
    assert matrix_mean_oscillation_at_zero(p, 2, math.exp(-10.0)) >= 0.005


def test_curve_matches_scalar_routines():
    p = RadialProfile.ex1(0.75, n=3)
    curve = oscillation_curve(p, t_grid=np.array([3.0, 8.0]))
    for t, gt, omega in zip(curve.t_grid, curve.gtilde, curve.omega_A):
        assert gt == pytest.approx(ball_mean(p, 3, math.exp(-t)), rel=1e-8)
        assert omega == pytest.approx(matrix_mean_oscillation_at_zero(p, 3, math.exp(-t)), rel=1e-8)
    np.testing.assert_allclose(curve.g_minus_gtilde, eval_g(p, curve.t_grid) - curve.gtilde)


@pytest.mark.parametrize("profile", [
    RadialProfile.ex1(0.75, n=3),
    RadialProfile.ex2(0.5),
    RadialProfile.ex3(10.0),
])
@pytest.mark.parametrize("norm", list(MatrixNorm))
def test_oscillation_dominates_its_lower_bound(profile, norm):
    curve = oscillation_curve(profile, norm=norm)
    lower = oscillation_lower_bound(profile, profile.n, curve.t_grid, norm)
    assert np.all(curve.omega_A >= lower - 1e-12)


def test_curve_frame_and_default_grid():
    p = RadialProfile.ex1(2.0)
    curve = oscillation_curve(p, points=32)
    assert curve.t_grid.size == 32
    assert curve.t_grid[-1] == pytest.approx(p.t_max - 18.0)
    frame = curve.to_frame()
    assert list(frame.columns) == ["t", "r", "gtilde", "g_minus_gtilde", "omega_A"]


@pytest.mark.parametrize("profile, expected", [
    (RadialProfile.zero(), Status.HOLDS_ANALYTIC),
    (RadialProfile.ex1(2.0), Status.HOLDS_ANALYTIC),
    (RadialProfile.ex1(0.75), Status.FAILS_ANALYTIC),
    (RadialProfile.ex2(2.0), Status.HOLDS_ANALYTIC),
    (RadialProfile.ex2(0.75), Status.FAILS_ANALYTIC),
    (RadialProfile.ex3(10.0), Status.FAILS_ANALYTIC),
])
def test_dmo_closed_forms(profile, expected):
    verdict = dmo_test(profile)
    assert verdict.status is expected
    assert verdict.rule is Rule.MEAN_OSCILLATION
    assert verdict.evidence["omega_integral"] >= 0.0


def test_dmo_on_tables():
    t = np.linspace(math.log(2.0), 40.0, 500)
    verdict = dmo_test(RadialProfile.from_table(t, np.zeros_like(t)))
    assert verdict.status is Status.HOLDS_NUMERIC_WINDOW
    assert verdict.evidence["omega_integral"] == 0.0


def test_dmo_without_oscillation_window():
    verdict = dmo_test(RadialProfile.ex1(2.0, t_max=15.0))
    assert verdict.status is Status.HOLDS_ANALYTIC
    assert verdict.evidence == {}
    with pytest.raises(OutOfDomain):
        oscillation_curve(RadialProfile.ex1(2.0, t_max=15.0))


def test_periodic_profile_oscillation_does_not_decay():
    p = RadialProfile.ex3(10.0, t_max=90.0)
    values = period_oscillation_integrals(p, periods=10)
    assert values.size == 10
    assert values.min() > 0.1
    np.testing.assert_allclose(values, values[0], rtol=1e-6)
    with pytest.raises(OutOfDomain):
        period_oscillation_integrals(RadialProfile.ex3(10.0), periods=10)


TABLE_T = np.linspace(math.log(2.0), 40.0, 50)
samples = st.lists(st.floats(-0.4, 0.4), min_size=TABLE_T.size, max_size=TABLE_T.size)


@settings(max_examples=25, deadline=None)
@given(g1=samples, g2=samples, a=st.floats(-1.0, 1.0), b=st.floats(-1.0, 1.0))
def test_ball_means_are_linear(g1, g2, a, b):
    g1, g2 = np.array(g1), np.array(g2)
    t = np.linspace(1.0, 20.0, 7)
    p1 = RadialProfile.from_table(TABLE_T, g1)
    p2 = RadialProfile.from_table(TABLE_T, g2)
    combined = RadialProfile.from_table(TABLE_T, a * g1 + b * g2)
    np.testing.assert_allclose(
        ball_means(combined, 2, t),
        a * ball_means(p1, 2, t) + b * ball_means(p2, 2, t),
        atol=1e-12,
    )


@pytest.mark.parametrize("profile", [
    RadialProfile.ex1(0.75),
    RadialProfile.ex1(2.0),
    RadialProfile.ex1(0.75, negative=True),
    RadialProfile.ex1(2.0, negative=True),
    RadialProfile.ex2(0.75),
    RadialProfile.ex2(2.0),
])
def test_dini_mean_oscillation_follows_dini(profile):
    assert dmo_test(profile).status is dini_test(profile).status
