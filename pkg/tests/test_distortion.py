import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from roughmerton.distortion import (
    check_conditions,
    distortion_power,
    forward_variance,
    hjb_integrand,
    martingale_check,
    solve_distortion,
    tilted_lambda,
)
from roughmerton.errors import DomainError, StagingError
from roughmerton.kernels import KernelSpec, TimeGrid
from roughmerton.models import MarketParams, VolterraHestonParams, simulate_volterra_heston
from roughmerton.riccati import RiccatiCoefficients, exponential_moment, solve_riccati, tol_riccati

from .test_riccati import rk4

GRID = TimeGrid.uniform(1.0, 256)


class TestDistortionPower:
    def test_examples(self):
        assert distortion_power(0.5, 0.0) == 1.0
        assert distortion_power(0.5, 0.5) == pytest.approx(0.8, rel=1e-15)
        assert distortion_power(1e-12, 0.9) == pytest.approx(1.0, abs=1e-11)

    @given(gamma=st.floats(0.01, 0.99), rho=st.floats(-0.99, 0.99))
    def test_range(self, gamma, rho):
        d = distortion_power(gamma, rho)
        assert 0.0 < d <= 1.0
        assert distortion_power(gamma, 0.0) == 1.0
        if abs(rho) > 1e-6:
            assert d < 1.0

    def test_domain(self):
        with pytest.raises(DomainError):
            distortion_power(1.0, 0.0)
        with pytest.raises(DomainError):
            distortion_power(0.5, -1.0)


class TestTiltedLambda:
    def test_examples(self, heston_const):
        assert tilted_lambda(MarketParams(0.02, 1.0, 0.0, 0.5, 1.0), heston_const) == 2.0
        assert tilted_lambda(MarketParams(0.02, 1.0, -0.5, 0.5, 1.0), heston_const) == pytest.approx(2.15)
        h = VolterraHestonParams(0.04, 1.0, 0.04, 0.5, KernelSpec.constant(1.0))
        assert tilted_lambda(MarketParams(0.02, 2.0, 0.9, 0.5, 1.0), h) == pytest.approx(0.1)


class TestForwardVariance:
    def test_constant_kernel_is_cir_mean(self, heston_const):
        h = VolterraHestonParams(0.09, 2.0, 0.04, 0.3, KernelSpec.constant(1.0))
        s = GRID.nodes
        xi = forward_variance(h, h.kappa, h.phi_mean, GRID)
        assert xi[0] == h.v0
        assert np.allclose(xi, 0.09 * np.exp(-2 * s) + 0.04 * (1 - np.exp(-2 * s)), rtol=1e-13, atol=0)

    def test_fractional_against_time_stepping(self):
        # xi - v0 solves f = K*(kappa (phi - v0) - kappa f)
        h = VolterraHestonParams(0.09, 2.0, 0.04, 0.3, KernelSpec.fractional(1.0, 0.6))
        g = TimeGrid.uniform(1.0, 1024)
        xi = forward_variance(h, h.kappa, h.phi_mean, g)
        f = solve_riccati(h.kernel, RiccatiCoefficients(h.kappa * (h.phi_mean - h.v0), -h.kappa, 0.0), g)
        assert xi[0] == h.v0
        assert np.max(np.abs(xi - h.v0 - f.values)) < 2e-4
        assert np.max(np.abs(xi - h.v0 - f.values)) <= tol_riccati(h.kernel, g.dt)

    def test_rejects_bad_mean_reversion(self, heston_frac):
        with pytest.raises(DomainError):
            forward_variance(heston_frac, 0.0, 0.04, GRID)


class TestConditions:
    def test_staging(self, market, heston_frac):
        with pytest.raises(StagingError):
            check_conditions(market, heston_frac)

    def test_reference_set(self, market, heston_frac):
        rep = solve_distortion(market, heston_frac, GRID).conditions
        assert rep.cond1 and rep.cond1_slack == pytest.approx(3.46)
        assert rep.cond2 and rep.cond2_slack == pytest.approx(2.15)
        assert rep.all_pass == (rep.cond1 and rep.cond2 and rep.cond3 and rep.eta_check)

    def test_zero_risk_premium(self, heston_frac):
        m = MarketParams(0.02, 0.0, -0.5, 0.5, 1.0)
        rep = solve_distortion(m, heston_frac, GRID).conditions
        assert rep.cond1 and rep.cond2 and rep.cond3 and rep.eta_check
        assert rep.cond2_slack == heston_frac.kappa
        assert rep.sup_abs_A == 0.0

    def test_inflated_vol_of_vol(self, market):
        h = VolterraHestonParams(0.04, 2.0, 0.04, 5.0, KernelSpec.fractional(1.0, 0.6))
        rep = solve_distortion(market, h, TimeGrid.uniform(1.0, 32)).conditions
        assert not rep.cond1 and not rep.all_pass

    def test_p_must_exceed_bound(self, market, heston_frac):
        sol = solve_distortion(market, heston_frac, GRID)
        bound = max(1.0, 0.5 / sol.delta)
        with pytest.raises(DomainError):
            check_conditions(market, heston_frac, sol, p=bound)
        with pytest.raises(DomainError):
            check_conditions(market, heston_frac, sol, a_scan=[1.0])
        assert check_conditions(market, heston_frac, sol, p=bound + 0.5).p == bound + 0.5

    @given(theta=st.floats(-3.0, 3.0), rho=st.floats(-0.9, 0.9), sigma=st.floats(0.05, 2.0))
    def test_flags_agree_with_slacks(self, theta, rho, sigma):
        m = MarketParams(0.02, theta, rho, 0.5, 1.0)
        h = VolterraHestonParams(0.04, 2.0, 0.04, sigma, KernelSpec.constant(1.0))
        if tilted_lambda(m, h) <= 0.0:
            return
        rep = solve_distortion(m, h, TimeGrid.uniform(1.0, 32)).conditions
        assert rep.cond1 == (rep.cond1_slack > 0) and rep.cond3 == (rep.cond3_slack > 0)
        assert rep.eta_check == (rep.eta_slack > 0)
        assert rep.all_pass == (rep.cond1 and rep.cond2 and rep.cond3 and rep.eta_check)


class TestSolveDistortion:
    def test_zero_correlation_strategy_is_constant(self, market_rho0, heston_frac):
        sol = solve_distortion(market_rho0, heston_frac, GRID)
        assert sol.delta == 1.0
        assert np.all(sol.strategy.values == market_rho0.theta / (1 - market_rho0.gamma_ra))

    def test_zero_premium_zero_rate(self, heston_frac):
        m = MarketParams(0.0, 0.0, -0.5, 0.5, 1.0, w0=2.0)
        sol = solve_distortion(m, heston_frac, GRID)
        assert np.all(sol.phi_curve.values == 0.0)
        assert sol.m0 == 1.0
        assert sol.j0 == 2.0 ** 0.5 / 0.5

    @given(c=st.floats(0.01, 100.0))
    def test_wealth_homogeneity(self, c):
        h = VolterraHestonParams(0.04, 2.0, 0.04, 0.3, KernelSpec.fractional(1.0, 0.6))
        a = solve_distortion(MarketParams(0.02, 1.0, -0.5, 0.5, 1.0, w0=1.5), h, TimeGrid.uniform(1.0, 32))
        b = solve_distortion(MarketParams(0.02, 1.0, -0.5, 0.5, 1.0, w0=1.5 * c), h, TimeGrid.uniform(1.0, 32))
        assert b.j0 == pytest.approx(c ** 0.5 * a.j0, rel=1e-14)
        assert a.value_at(1.5 * c) == pytest.approx(b.j0, rel=1e-14)
        assert np.array_equal(a.strategy.values, b.strategy.values)

    def test_classical_value_against_ode(self):
        # rho = 0, constant kernel: m0 = e^{gamma r T} E[exp(a int V)] with a = gamma theta^2 / (2 (1 - gamma))
        m = MarketParams(0.02, 1.0, 0.0, 0.5, 1.0)
        h = VolterraHestonParams(0.04, 2.0, 0.04, 0.3, KernelSpec.constant(1.0))
        a = 0.5 / (2 * 0.5)

        def rhs(y):
            g = y[0]
            return np.array([a - h.kappa * g + 0.5 * h.sigma ** 2 * g * g, h.kappa * h.phi_mean * g])

        g_t, psi_t = rk4(rhs, [0.0, 0.0], 1.0, 10_000)
        oracle = math.exp(0.5 * m.r + h.v0 * g_t + psi_t)
        sol = solve_distortion(m, h, TimeGrid.uniform(1.0, 512))
        assert sol.m0 == pytest.approx(oracle, rel=1e-5)

    @given(theta=st.floats(0.1, 1.5), gamma=st.floats(0.1, 0.8),
           kernel=st.sampled_from([KernelSpec.constant(1.0), KernelSpec.fractional(1.0, 0.6),
                                   KernelSpec.exponential(1.0, 0.5)]))
    def test_value_matches_exponential_moment_without_correlation(self, theta, gamma, kernel):
        m = MarketParams(0.02, theta, 0.0, gamma, 1.0)
        h = VolterraHestonParams(0.04, 2.0, 0.04, 0.3, kernel)
        g = TimeGrid.uniform(1.0, 256)
        a = gamma * theta ** 2 / (2 * (1 - gamma))
        expected = math.exp(gamma * m.r) * exponential_moment(h, a, grid=g, allow_local=True)
        assert solve_distortion(m, h, g).m0 == pytest.approx(expected, rel=2e-3)

    def test_strategy_maximises_pointwise_drift(self, market, heston_frac):
        sol = solve_distortion(market, heston_frac, GRID)
        b = simulate_volterra_heston(heston_frac, market, GRID, 200, seed=3)
        for j in (0, 50, 128, 255):
            t = GRID.nodes[j]
            v = b.v[:, j]
            star = sol.strategy(t)
            f0 = hjb_integrand(star, t, v, sol)
            assert np.all(hjb_integrand(star + 1e-3, t, v, sol) <= f0)
            assert np.all(hjb_integrand(star - 1e-3, t, v, sol) <= f0)
            assert np.allclose(f0, 0.0, atol=1e-15)

    def test_nonpositive_lambda(self):
        m = MarketParams(0.02, 3.0, 0.9, 0.5, 1.0)
        h = VolterraHestonParams(0.04, 1.0, 0.04, 0.5, KernelSpec.constant(1.0))
        with pytest.raises(DomainError):
            solve_distortion(m, h, GRID)

    def test_grid_and_rate_curve(self, market, heston_frac):
        with pytest.raises(DomainError):
            solve_distortion(market, heston_frac, TimeGrid.uniform(2.0, 16))
        flat = solve_distortion(market, heston_frac, GRID, rate_curve=np.full(257, market.r))
        assert flat.m0 == pytest.approx(solve_distortion(market, heston_frac, GRID).m0, rel=1e-14)
        with pytest.raises(DomainError):
            solve_distortion(market, heston_frac, GRID, rate_curve=np.zeros(10))

    def test_exports(self, market, heston_frac):
        sol = solve_distortion(market, heston_frac, TimeGrid.uniform(1.0, 8))
        strat = sol.strategy.to_csv().splitlines()
        assert strat[0] == "t,pi_star" and len(strat) == 10
        curves = sol.curves_csv().splitlines()
        assert curves[0] == "t,phi,xi0" and len(curves) == 10
        summary = json.loads(sol.to_json())
        assert set(summary) == {"delta", "lambda", "m0", "j0", "conditions"}
        assert summary["j0"] == sol.j0
        with pytest.raises(DomainError):
            sol.strategy(1.5)
        assert sol.strategy(0.0) == sol.strategy.values[0]


class TestMartingaleCheck:
    def test_small_constant_kernel_run(self, market, heston_const):
        sol = solve_distortion(market, heston_const, GRID)
        chk = martingale_check(sol, 20_000, seed=5, grid=TimeGrid.uniform(1.0, 64))
        assert chk.scheme == "euler"
        d = chk.to_dict()
        assert set(d["utilities"]) == {"optimal", "zero", "double"}
        mean, se = chk.utilities["zero"]
        assert se == 0.0
        assert mean == pytest.approx((math.exp(market.r)) ** 0.5 / 0.5, rel=1e-12)
        assert chk.consistent

    def test_singular_kernel_defaults_to_ivi(self, market, heston_frac):
        sol = solve_distortion(market, heston_frac, GRID)
        chk = martingale_check(sol, 2000, seed=5, grid=TimeGrid.uniform(1.0, 16))
        assert chk.scheme == "ivi"
