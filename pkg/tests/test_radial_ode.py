import math

import numpy as np
import pytest

from regularity.errors import HypothesisUnmet
from regularity.profiles import RadialProfile
from regularity.verdicts import Status
from solvers.radial_ode import (
    ClosedFormCandidate,
    asymptotic_ratio,
    eigenvalues,
    finite_energy,
    ode_residual,
    shoot,
    solve_Z,
    z_linear_bound,
)


@pytest.mark.parametrize("n", [2, 3])
def test_eigenvalues_at_zero_and_their_slope(n):
    mu1, mu2 = eigenvalues(0.0, n)
    assert float(mu1) == pytest.approx(-1.0)
    assert float(mu2) == pytest.approx(n - 1.0)
    eps = 1e-6
    slope = (float(eigenvalues(eps, n)[0]) - float(eigenvalues(-eps, n)[0])) / (2 * eps)
    assert slope == pytest.approx((n - 1) / n, abs=1e-6)


@pytest.mark.parametrize("n", [2, 3])
def test_zero_profile_gives_linear_z(n):
    p = RadialProfile.zero(n=n)
    sol = solve_Z(p)
    np.testing.assert_allclose(sol.v_over_r, 1.0, atol=1e-8)
    assert ode_residual(p, sol) < 1e-6


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("c", [-0.5, 0.3])
def test_constant_profile_gives_power_law(n, c):
    # r^alpha solves (1 + c)(v'' + (n - 1) v' / r) = (n - 1) v / r^2 when (1 + c) alpha (alpha + n - 2) = n - 1
    alpha = (-(n - 2) + math.sqrt((n - 2) ** 2 + 4.0 * (n - 1) / (1.0 + c))) / 2.0
    p = RadialProfile.const(c, n=n)
    sol = solve_Z(p)
    exact = math.exp(-p.t_min) * np.exp(-alpha * (sol.t_grid - p.t_min))
    np.testing.assert_allclose(sol.v, exact, rtol=1e-6)


@pytest.mark.parametrize("n", [2, 3])
def test_periodic_closed_form_solves_the_ode(n):
    A = 10.0
    p = RadialProfile.ex3(A, n=n)
    assert ode_residual(p, ClosedFormCandidate.periodic_linear(A), window=(1.0, 30.0)) < 1e-8
    assert ode_residual(p, ClosedFormCandidate.linear(), window=(1.0, 30.0)) > 1e-3


def test_solve_z_matches_periodic_closed_form(ex3_profile):
    sol = solve_Z(ex3_profile)
    candidate = ClosedFormCandidate.periodic_linear(10.0)
    t0 = ex3_profile.t_min
    exact = math.exp(-t0) * candidate.value(sol.t_grid) / float(candidate.value(np.array([t0]))[0])
    inner = sol.t_grid <= 30.0
    np.testing.assert_allclose(sol.v[inner], exact[inner], rtol=1e-6)


def test_step_is_bounded(zero2):
    with pytest.raises(ValueError):
        solve_Z(zero2, step=2e-3)


def test_rk4_order():
    p = RadialProfile.const(0.3)
    mu, _ = eigenvalues(0.3, 2)
    errors = []
    for step in (0.1, 0.05):
        sol = shoot(p, 2, 10.0, 1.0, 1.3 * float(mu), 2.0, step=step)
        exact = math.exp(float(mu) * (2.0 - 10.0))
        assert sol.t_grid[0] == pytest.approx(2.0)
        errors.append(abs(sol.v[0] - exact) / exact)
    assert math.log2(errors[0] / errors[1]) > 3.5


def test_finite_energy_of_linear_solution(zero2):
    energy, verdict = finite_energy(solve_Z(zero2))
    assert energy == pytest.approx(0.25, rel=1e-6)
    assert verdict.status is Status.HOLDS_NUMERIC_WINDOW


def test_asymptotic_law_for_slowly_decaying_profile():
    p = RadialProfile.ex1(0.75)
    sol = solve_Z(p)
    linear = asymptotic_ratio(sol, p, fit_t=25.0)
    refined = asymptotic_ratio(sol, p, fit_t=25.0, exponent="eigenvalue")
    assert linear.drift < 0.05
    assert refined.drift < linear.drift
    assert linear.model.shape == sol.t_grid.shape


def test_asymptotic_law_needs_finite_variation(ex3_profile):
    with pytest.raises(HypothesisUnmet):
        asymptotic_ratio(solve_Z(ex3_profile), ex3_profile)


def test_linear_bound_readings(zero2):
    bound = z_linear_bound(solve_Z(zero2))
    assert bound.verdict.status is Status.HOLDS_NUMERIC_WINDOW
    assert not bound.vanishing
    assert bound.sup_ratio == pytest.approx(1.0, abs=1e-8)

    growing = z_linear_bound(solve_Z(RadialProfile.ex1(0.75)))
    assert growing.verdict.status is Status.FAILS_NUMERIC_WINDOW
    assert growing.trend > 0


def test_solution_frame(zero2):
    frame = solve_Z(zero2).to_frame()
    assert list(frame.columns) == ["t", "r", "v", "w", "v_over_r"]
    np.testing.assert_allclose(frame["r"], np.exp(-frame["t"]))


@pytest.mark.parametrize("n, expected", [(2, 0.25), (3, 1.0 / 12.0)])
def test_energy_of_linear_solution_by_dimension(n, expected):
    energy, verdict = finite_energy(solve_Z(RadialProfile.zero(n=n)))
    assert energy == pytest.approx(expected, rel=1e-6)
    assert verdict.holds


def test_growing_solution_has_infinite_energy(zero2):
    growing = shoot(zero2, 2, zero2.t_min, 1.0, 1.0, 20.0)
    np.testing.assert_allclose(growing.v, np.exp(growing.t_grid - zero2.t_min), rtol=1e-8)
    energy, verdict = finite_energy(growing)
    assert math.isinf(energy)
    assert verdict.status is Status.FAILS_NUMERIC_WINDOW
    assert verdict.evidence["decay_rate"] < 0


@pytest.mark.parametrize("p", [RadialProfile.ex1(0.75), RadialProfile.ex2(0.5, n=3)])
def test_z_is_stable_under_step_halving(p):
    coarse = solve_Z(p, step=1e-3)
    fine = solve_Z(p, step=5e-4)
    t = np.linspace(p.t_min, p.t_max, 400)
    np.testing.assert_allclose(fine.at(t), coarse.at(t), rtol=1e-6)


def test_forward_shot_from_z_retraces_it():
    p = RadialProfile.ex1(0.75)
    Z = solve_Z(p)
    forward = shoot(p, 2, p.t_min, float(Z.v[0]), float(Z.w[0]), 6.0)
    np.testing.assert_allclose(forward.v, Z.at(forward.t_grid), rtol=1e-6)
