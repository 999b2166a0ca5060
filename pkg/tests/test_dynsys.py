import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from regularity.dynsys import (
    classification,
    classify,
    compute_R_matrix,
    cumulative_S,
    gilbarg_serrin_field,
    gs_R_matrix,
    periodic_increments,
)
from regularity.errors import ContradictoryVerdicts, UnsupportedDimension
from regularity.profiles import RadialProfile, eval_g, ex3_constants, log_grid
from regularity.verdicts import RegularityVerdict, Rule, Status, Verdict


def test_r_matrix_matches_closed_form_on_random_samples(rng):
    for _ in range(20):
        g = float(rng.uniform(-0.9, 2.0))
        n = int(rng.choice([2, 3]))
        r = float(rng.uniform(0.01, 0.5))
        numeric = compute_R_matrix(gilbarg_serrin_field(g), n, r)
        np.testing.assert_allclose(numeric, gs_R_matrix(g, n), atol=1e-10)


def test_r_matrix_with_radial_callable():
    field = gilbarg_serrin_field(lambda r: np.log(1.0 / r) ** -1.0)
    r = math.exp(-5.0)
    np.testing.assert_allclose(compute_R_matrix(field, 2, r), gs_R_matrix(0.2, 2), atol=1e-10)


def test_r_matrix_dimension():
    with pytest.raises(UnsupportedDimension):
        compute_R_matrix(gilbarg_serrin_field(0.1), 4, 0.1)


def test_s_of_zero_and_constant_profiles(zero2):
    assert np.all(cumulative_S(zero2).S_grid == 0.0)
    p = RadialProfile.const(-0.5)
    report = cumulative_S(p)
    np.testing.assert_allclose(report.S_grid, -0.25 * (report.t_grid - p.t_min), atol=1e-12)
    assert report.to_minus_infinity.status is Status.HOLDS_ANALYTIC
    assert report.sup_increment == pytest.approx(0.0, abs=1e-12)


def test_s_grid_spacing_is_checked():
    p = RadialProfile.ex1(2.0)
    with pytest.raises(ValueError):
        cumulative_S(p, grid=np.linspace(p.t_min, p.t_max, 100))


def test_s_frame_columns():
    frame = cumulative_S(RadialProfile.ex2(1.0)).to_frame()
    assert list(frame.columns) == ["t", "S", "running_min"]


@pytest.mark.parametrize("A", [10.0, 50.0])
def test_ex3_period_integrals(A):
    p = RadialProfile.ex3(A, t_max=70.0)
    c1, c2 = ex3_constants(2)
    increments = periodic_increments(p, periods=10)
    assert increments.size == 10
    np.testing.assert_allclose(increments, math.pi * (c1 - c2) / A ** 2, atol=5.0 / A ** 3)


def test_ex3_s_grows_linearly():
    p = RadialProfile.ex3(10.0, t_max=70.0)
    report = cumulative_S(p)
    period = 2.0 * math.pi
    at = np.interp(p.t_min + period * np.arange(1, 11), report.t_grid, report.S_grid)
    steps = np.diff(at)
    assert np.all(steps > 0.0)
    np.testing.assert_allclose(steps, steps.mean(), rtol=1e-3)
    assert report.limsup_divergent.status is Status.HOLDS_ANALYTIC
    assert report.uniform_stable.status is Status.FAILS_ANALYTIC


def test_numeric_stability_on_tables():
    t = np.linspace(math.log(2.0), 40.0, 2000)
    p = RadialProfile.from_table(t, np.full_like(t, -0.2))
    report = cumulative_S(p)
    assert report.uniform_stable.status is Status.HOLDS_NUMERIC_WINDOW
    assert report.limsup_divergent.status is Status.FAILS_NUMERIC_WINDOW


def test_zero_profile_classification(zero2):
    verdict = classify(zero2)
    assert verdict.lipschitz_at_0.status is Status.HOLDS_ANALYTIC
    assert verdict.differentiable_at_0.status is Status.HOLDS_ANALYTIC
    assert verdict.c1_neighborhood.status is Status.HOLDS_ANALYTIC
    assert verdict.non_lipschitz_exists.status is Status.FAILS_ANALYTIC
    assert verdict.grad_zero_at_0.status is Status.INCONCLUSIVE
    assert not verdict.all_inconclusive
    assert [r["criterion"] for r in verdict.to_records()] == list(RegularityVerdict.CRITERIA)


@pytest.mark.parametrize("gamma", [0.3, 0.75, 1.0])
def test_slowly_decaying_positive_profiles_are_not_lipschitz(gamma):
    verdict = classify(RadialProfile.ex1(gamma))
    assert verdict.non_lipschitz_exists.holds
    assert verdict.lipschitz_at_0.fails
    assert verdict.non_lipschitz_exists.rule is Rule.GROWTH


@pytest.mark.parametrize("gamma", [1.5, 2.0])
def test_fast_decaying_positive_profiles_are_c1(gamma):
    verdict = classify(RadialProfile.ex1(gamma))
    assert verdict.lipschitz_at_0.holds
    assert verdict.c1_neighborhood.holds
    assert verdict.differentiable_at_0.holds


@pytest.mark.parametrize("gamma", [0.3, 0.75, 2.0])
def test_negative_profiles_are_lipschitz(gamma):
    verdict = classify(RadialProfile.ex1(gamma, negative=True))
    assert verdict.lipschitz_at_0.holds
    assert not verdict.non_lipschitz_exists.holds
    if gamma <= 1.0:
        assert verdict.grad_zero_at_0.holds


def test_negative_profile_below_square_dini_uses_comparison():
    result = classification(RadialProfile.ex1(0.3, negative=True))
    assert result.z_bound is not None and result.z_bound.vanishing
    assert result.verdict.lipschitz_at_0.status is Status.HOLDS_NUMERIC_WINDOW
    assert result.verdict.lipschitz_at_0.rule is Rule.COMPARISON


@pytest.mark.parametrize("beta", [0.3, 0.75, 2.0])
def test_log_sine_profiles_are_lipschitz(beta):
    assert classify(RadialProfile.ex2(beta)).lipschitz_at_0.holds


def test_periodic_profile_is_lipschitz_by_comparison(ex3_profile):
    result = classification(ex3_profile)
    verdict = result.verdict
    assert verdict.lipschitz_at_0.status is Status.HOLDS_NUMERIC_WINDOW
    assert verdict.lipschitz_at_0.rule is Rule.COMPARISON
    assert verdict.non_lipschitz_exists.fails
    assert not verdict.grad_zero_at_0.holds
    assert not result.z_bound.vanishing


def test_contradictory_verdicts_are_rejected():
    holds = Verdict(Status.HOLDS_ANALYTIC)
    fails = Verdict(Status.FAILS_ANALYTIC)
    with pytest.raises(ContradictoryVerdicts):
        RegularityVerdict(holds, fails, fails, holds, fails)
    with pytest.raises(ContradictoryVerdicts):
        RegularityVerdict(fails, holds, fails, fails, fails)


@pytest.mark.parametrize("n", [2, 3])
def test_s_end_for_harmonic_decay(n):
    p = RadialProfile.ex1(1.0, n=n)
    report = cumulative_S(p)
    assert report.t_grid[-1] == pytest.approx(40.0)
    expected = ((n - 1) / n) * (math.log(40.0) - math.log(math.log(2.0)))
    assert report.S_grid[-1] == pytest.approx(expected, rel=1e-7)


STABILITY_GRID = [
    RadialProfile.zero(),
    RadialProfile.const(-0.5),
    RadialProfile.const(-0.1),
    RadialProfile.const(0.1),
    RadialProfile.const(0.4),
    RadialProfile.ex1(0.5),
    RadialProfile.ex1(0.5, scale=0.5),
    RadialProfile.ex1(1.0),
    RadialProfile.ex1(1.5),
    RadialProfile.ex1(2.0, scale=0.5),
    RadialProfile.ex1(0.5, negative=True),
    RadialProfile.ex1(1.0, negative=True),
    RadialProfile.ex1(2.0, negative=True),
    RadialProfile.ex2(1.0),
    RadialProfile.ex2(2.0),
]


def test_uniform_stability_is_monotone_in_g():
    stable = [cumulative_S(p).uniform_stable.holds for p in STABILITY_GRID]
    compared = 0
    for lower, lower_stable in zip(STABILITY_GRID, stable):
        for upper, upper_stable in zip(STABILITY_GRID, stable):
            t = np.linspace(max(lower.t_min, upper.t_min), 40.0, 4001)
            if lower is upper or np.any(eval_g(lower, t) > eval_g(upper, t)):
                continue
            compared += 1
            assert lower_stable or not upper_stable, (lower.to_dict(), upper.to_dict())
    assert compared >= 20


@settings(max_examples=20, deadline=None)
@given(gamma=st.sampled_from([0.3, 0.75, 1.0]), s=st.floats(min_value=0.05, max_value=1.0))
def test_scaling_keeps_positive_profiles_non_lipschitz(gamma, s):
    verdict = classify(RadialProfile.ex1(gamma, scale=s))
    assert verdict.non_lipschitz_exists.holds
