import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import erfcx

from roughmerton.errors import ConvergenceError, DomainError
from roughmerton.kernels import (
    KernelKind,
    KernelSpec,
    ResolventSource,
    TimeGrid,
    canonical,
    convolve_grid,
    eval_kernel,
    first_kind_check,
    kernel_double_primitive,
    kernel_primitive,
    mittag_leffler,
    resolvent_residual,
    resolvent_scaled,
    resolvent_second_kind,
    tol_res,
)
from roughmerton.riccati import RiccatiCoefficients, solve_riccati

from .conftest import ALL_KERNELS

GAMMA_06 = 1.489192248812817  # tabulated Gamma(0.6)


def ml_oracle(alpha, beta, x, dps=40):
    with mpmath.workdps(dps):
        return float(mpmath.nsum(lambda n: mpmath.mpf(x) ** n / mpmath.gamma(alpha * n + beta),
                                 [0, mpmath.inf]))


# ---------------------------------------------------------------------------
# kernel specs and grids


class TestKernelSpec:
    @pytest.mark.parametrize("kwargs", [
        dict(kind="Constant", c=0.0),
        dict(kind="Constant", c=-1.0),
        dict(kind="Fractional", c=1.0),
        dict(kind="Fractional", c=1.0, alpha=0.0),
        dict(kind="Fractional", c=1.0, alpha=1.2),
        dict(kind="Exponential", c=1.0, lam=0.0),
        dict(kind="Gamma", c=1.0, alpha=0.5),
        dict(kind="Constant", c=1.0, alpha=0.5),
        dict(kind="Constant", c=float("nan")),
        dict(kind="Triangle", c=1.0),
    ])
    def test_invalid_specs_are_rejected(self, kwargs):
        with pytest.raises(DomainError):
            KernelSpec(**kwargs)

    def test_l2_flag(self):
        assert KernelSpec.fractional(1.0, 0.6).l2_ok
        assert not KernelSpec.fractional(1.0, 0.4).l2_ok
        assert KernelSpec.gamma(1.0, 0.4, 1.0).l2_ok

    @pytest.mark.parametrize("spec", ALL_KERNELS)
    def test_dict_round_trip(self, spec):
        assert KernelSpec.from_dict(spec.to_dict()) == spec

    def test_unknown_dict_keys(self):
        with pytest.raises(DomainError):
            KernelSpec.from_dict({"kind": "constant", "c": 1.0, "beta": 2.0})

    def test_kind_parsing_is_case_insensitive(self):
        assert KernelKind.parse("gAmMa") is KernelKind.GAMMA

    def test_grid_ends_at_horizon(self):
        for horizon, n in [(1.0, 256), (2.0, 3), (0.7, 1000), (10.0, 4096)]:
            g = TimeGrid.uniform(horizon, n)
            assert abs(g.nodes[-1] - horizon) <= 1e-12 * horizon
        assert TimeGrid.from_dt(2.0, 1 / 256).n_steps == 512
        with pytest.raises(DomainError):
            TimeGrid.from_dt(1.0, 0.3)
        with pytest.raises(DomainError):
            TimeGrid(0.1, 0)


# ---------------------------------------------------------------------------
# pointwise kernel and primitives


class TestEvalKernel:
    def test_constant(self):
        assert eval_kernel(KernelSpec.constant(2.0), 5.0) == 2.0

    def test_fractional_alpha_one(self):
        assert eval_kernel(KernelSpec.fractional(1.0, 1.0), 3.0) == 1.0

    def test_fractional_at_one(self):
        value = eval_kernel(KernelSpec.fractional(1.0, 0.6), 1.0)
        assert value == pytest.approx(1.0 / float(mpmath.gamma(0.6)), rel=1e-14)
        assert value == pytest.approx(1.0 / GAMMA_06, rel=1e-14)

    def test_exponential_and_gamma(self):
        assert eval_kernel(KernelSpec.exponential(2.0, 0.5), 2.0) == pytest.approx(2.0 * math.exp(-1.0))
        expected = 3.0 * math.exp(-2.0) * 2.0 ** -0.4 / GAMMA_06
        assert eval_kernel(KernelSpec.gamma(3.0, 0.6, 1.0), 2.0) == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize("spec", [KernelSpec.fractional(1.0, 0.6), KernelSpec.gamma(1.0, 0.6, 1.0)])
    def test_singular_kernels_reject_origin(self, spec):
        with pytest.raises(DomainError):
            eval_kernel(spec, 0.0)
        with pytest.raises(DomainError):
            eval_kernel(spec, -1.0)

    @pytest.mark.parametrize("spec", ALL_KERNELS)
    def test_complete_monotonicity_spot_check(self, spec):
        t = TimeGrid.uniform(2.0, 256).nodes[1:]
        k = np.asarray(eval_kernel(spec, t))
        assert np.all(k > 0.0)
        assert np.all(np.diff(k) <= 0.0)


class TestPrimitives:
    def test_fractional_unit_interval(self):
        value = kernel_primitive(KernelSpec.fractional(1.0, 0.6), 0.0, 1.0)
        assert value == pytest.approx(1.0 / float(mpmath.gamma(1.6)), rel=1e-14)

    def test_constant(self):
        assert kernel_primitive(KernelSpec.constant(3.0), 1.0, 2.0) == 3.0

    def test_gamma_against_adaptive_quadrature(self):
        spec = KernelSpec.gamma(1.0, 0.6, 1.0)
        oracle, _ = quad(lambda u: math.exp(-u) / GAMMA_06, 0.0, 1.0, weight="alg", wvar=(-0.4, 0.0),
                         epsabs=1e-14, epsrel=1e-14)
        assert kernel_primitive(spec, 0.0, 1.0) == pytest.approx(oracle, rel=1e-12)

    @pytest.mark.parametrize("spec", ALL_KERNELS)
    @pytest.mark.parametrize("a,b", [(0.0, 0.3), (0.5, 0.75), (1.0, 7.0), (3.0, 3.0)])
    def test_against_quadrature(self, spec, a, b):
        if spec.singular and a == 0.0:
            alpha = spec.alpha
            lam = spec.lam or 0.0
            oracle, _ = quad(lambda u: spec.c * math.exp(-lam * u) / math.gamma(alpha), 0.0, b,
                             weight="alg", wvar=(alpha - 1.0, 0.0), epsabs=1e-14)
        else:
            oracle, _ = quad(lambda u: eval_kernel(spec, u), a, b, epsabs=1e-14, epsrel=1e-13)
        assert kernel_primitive(spec, a, b) == pytest.approx(oracle, rel=1e-10, abs=1e-14)

    def test_reversed_limits(self):
        with pytest.raises(DomainError):
            kernel_primitive(KernelSpec.constant(1.0), 2.0, 1.0)

    @pytest.mark.parametrize("spec", ALL_KERNELS)
    def test_double_primitive_matches_quadrature(self, spec):
        t = 0.8
        oracle, _ = quad(lambda s: kernel_primitive(spec, 0.0, s), 0.0, t, epsabs=1e-14)
        assert kernel_double_primitive(spec, t) == pytest.approx(oracle, rel=1e-10)

    @given(spec=st.sampled_from(ALL_KERNELS),
           a=st.floats(0.0, 5.0), d1=st.floats(0.0, 3.0), d2=st.floats(0.0, 3.0))
    def test_additivity_and_positivity(self, spec, a, d1, d2):
        b, c = a + d1, a + d1 + d2
        ab = kernel_primitive(spec, a, b)
        bc = kernel_primitive(spec, b, c)
        ac = kernel_primitive(spec, a, c)
        assert ab >= 0.0 and bc >= 0.0
        assert ab + bc == pytest.approx(ac, rel=1e-11, abs=1e-14)


# ---------------------------------------------------------------------------
# Mittag-Leffler


class TestMittagLeffler:
    def test_exp_at_one(self):
        assert mittag_leffler(1.0, 1.0, 1.0) == pytest.approx(2.718281828459045, rel=1e-15)

    def test_half_order_at_minus_one(self):
        expected = float(mpmath.e * mpmath.erfc(1))
        assert abs(mittag_leffler(0.5, 1.0, -1.0) - expected) < 1e-13
        assert abs(expected - 0.427583576156) < 1e-12

    def test_exp_on_wide_range(self):
        x = np.linspace(-30.0, 30.0, 601)
        got = mittag_leffler(1.0, 1.0, x)
        assert np.all(np.abs(got - np.exp(x)) <= 1e-10 * np.maximum(1.0, np.exp(x)))

    def test_general_path_against_exponential_identity(self):
        # E_{1,2}(x) = (e^x - 1) / x, evaluated without the alpha = beta = 1 shortcut
        x = np.concatenate([np.linspace(-30.0, -0.01, 300), np.linspace(0.01, 30.0, 300)])
        got = mittag_leffler(1.0, 2.0, x)
        expected = np.expm1(x) / x
        assert np.all(np.abs(got - expected) <= 1e-10 * np.maximum(1.0, expected))

    def test_half_order_against_erfcx(self):
        x = np.linspace(0.0, 50.0, 501)
        got = mittag_leffler(0.5, 1.0, -x)
        assert np.max(np.abs(got - erfcx(x))) < 1e-10

    def test_order_two_is_cosine(self):
        s = np.linspace(0.0, 7.0, 50)
        got = mittag_leffler(2.0, 1.0, -s * s)
        assert np.max(np.abs(got - np.cos(s))) < 1e-10

    @given(alpha=st.floats(0.05, 3.0), beta=st.floats(0.05, 5.0))
    def test_zero_argument(self, alpha, beta):
        assert mittag_leffler(alpha, beta, 0.0) == pytest.approx(1.0 / math.gamma(beta), rel=1e-12, abs=1e-300)

    @pytest.mark.parametrize("alpha,beta,x", [
        (0.6, 0.6, -1.0), (0.6, 0.6, -8.0), (0.6, 1.0, -3.0), (0.75, 0.75, -0.3),
        (0.9, 1.0, 2.5), (0.3, 0.3, -5.0), (0.6, 0.6, 4.0), (0.95, 0.95, -9.5),
    ])
    def test_against_high_precision_series(self, alpha, beta, x):
        assert abs(mittag_leffler(alpha, beta, x) - ml_oracle(alpha, beta, x)) < 1e-10

    def test_invalid_parameters(self):
        with pytest.raises(DomainError):
            mittag_leffler(0.0, 1.0, 1.0)
        with pytest.raises(DomainError):
            mittag_leffler(1.0, -1.0, 1.0)

    def test_overflow_is_reported(self):
        with pytest.raises(ConvergenceError):
            mittag_leffler(0.5, 1.0, 1000.0)


# ---------------------------------------------------------------------------
# convolution quadrature


class TestConvolveGrid:
    def test_constant_kernel_on_ones(self):
        g = TimeGrid.uniform(2.0, 128)
        out = convolve_grid(KernelSpec.constant(1.0), np.ones(129), g)
        assert np.allclose(out, g.nodes, rtol=0, atol=1e-13)

    def test_fractional_on_ones(self):
        g = TimeGrid.uniform(2.0, 128)
        spec = KernelSpec.fractional(1.0, 0.6)
        out = convolve_grid(spec, np.ones(129), g)
        assert np.allclose(out, g.nodes ** 0.6 / math.gamma(1.6), rtol=1e-12, atol=1e-14)

    def test_fractional_on_identity_is_first_order(self):
        spec = KernelSpec.fractional(1.0, 0.6)
        errs = []
        for n in (64, 128, 256, 512):
            g = TimeGrid.uniform(1.0, n)
            out = convolve_grid(spec, g.nodes, g)
            errs.append(np.max(np.abs(out - g.nodes ** 1.6 / math.gamma(2.6))))
        errs = np.array(errs)
        dts = 1.0 / np.array([64, 128, 256, 512])
        assert np.all(errs <= dts)
        assert np.all(errs[1:] / errs[:-1] < 0.6)

    def test_length_mismatch(self):
        g = TimeGrid.uniform(1.0, 8)
        with pytest.raises(DomainError):
            convolve_grid(KernelSpec.constant(1.0), np.ones(8), g)


# ---------------------------------------------------------------------------
# resolvents


class TestResolvent:
    def test_constant_row(self):
        g = TimeGrid.uniform(1.0, 64)
        curve = resolvent_second_kind(KernelSpec.constant(2.0), g)
        assert curve.values[-1] == pytest.approx(0.270670566473225, rel=1e-14)
        assert curve.source is ResolventSource.CLOSED_FORM

    def test_exponential_row(self):
        g = TimeGrid.uniform(1.0, 64)
        curve = resolvent_second_kind(KernelSpec.exponential(1.0, 0.5), g)
        assert curve.values[-1] == pytest.approx(math.exp(-1.5), rel=1e-14)

    def test_fractional_row(self):
        g = TimeGrid.uniform(1.0, 64)
        curve = resolvent_second_kind(KernelSpec.fractional(1.0, 0.6), g)
        assert abs(curve.values[-1] - ml_oracle(0.6, 0.6, -1.0)) < 1e-12
        assert math.isinf(curve.values[0])
        assert np.all(np.isfinite(curve.values[1:]))

    def test_scaled_fractional(self):
        g = TimeGrid.uniform(0.5, 32)
        curve = resolvent_scaled(KernelSpec.fractional(1.0, 0.6), 3.0, g)
        expected = 3.0 * 0.5 ** -0.4 * ml_oracle(0.6, 0.6, -3.0 * 0.5 ** 0.6)
        assert abs(curve.values[-1] - expected) < 1e-12

    def test_scaled_identities(self):
        g = TimeGrid.uniform(1.0, 16)
        a = resolvent_scaled(KernelSpec.constant(1.0), 2.0, g)
        assert a.values[-1] == pytest.approx(2.0 * math.exp(-2.0), rel=1e-15)
        spec = KernelSpec.fractional(1.0, 0.6)
        b = resolvent_scaled(spec, 1.0, g)
        c = resolvent_second_kind(spec, g)
        assert np.array_equal(b.values[1:], c.values[1:])
        assert np.array_equal(b.integral, c.integral)

    @pytest.mark.parametrize("spec", ALL_KERNELS)
    def test_identity_residual_shrinks_with_dt(self, spec):
        res = []
        for n in (128, 256, 512):
            g = TimeGrid.uniform(2.0, n)
            r = float(np.max(np.abs(resolvent_residual(resolvent_second_kind(spec, g)))))
            assert r <= tol_res(spec, g.dt)
            res.append(r)
        # nonincreasing up to rounding; numerically solved curves sit at machine precision
        assert res[1] <= res[0] + 1e-14 and res[2] <= res[1] + 1e-14

    def test_gamma_numerical_against_shifted_closed_form(self):
        # e^{-lt} K_frac has resolvent e^{-lt} R_frac
        spec = KernelSpec.gamma(1.0, 0.6, 1.0)
        g = TimeGrid.uniform(2.0, 1024)
        curve = resolvent_second_kind(spec, g)
        assert curve.source is ResolventSource.NUMERICAL
        t = g.nodes[1:]
        exact = np.exp(-t) * t ** -0.4 * mittag_leffler(0.6, 0.6, -(t ** 0.6))
        assert np.max(np.abs(curve.values[1:] - exact)) <= tol_res(spec, g.dt)
        mask = t >= 0.25
        assert np.max(np.abs(curve.values[1:][mask] - exact[mask])) < 5e-3

    def test_first_kind_fractional(self):
        spec = KernelSpec.fractional(1.0, 0.6)
        for n in (128, 256, 512):
            g = TimeGrid.uniform(2.0, n)
            err = np.max(np.abs(first_kind_check(spec, g) - 1.0))
            assert err <= 2.0 * g.dt ** min(0.6, 0.4)

    def test_first_kind_rejects_smooth_kernels(self):
        with pytest.raises(DomainError):
            first_kind_check(KernelSpec.constant(1.0), TimeGrid.uniform(1.0, 4))

    def test_csv_columns(self):
        g = TimeGrid.uniform(1.0, 4)
        text = resolvent_second_kind(KernelSpec.constant(1.0), g).to_csv()
        lines = text.strip().splitlines()
        assert lines[0] == "t,R"
        assert len(lines) == 6
        t, r = map(float, lines[-1].split(","))
        assert t == 1.0 and r == pytest.approx(math.exp(-1.0))


# ---------------------------------------------------------------------------
# alpha = 1 degeneracy


class TestUnitAlphaDegeneracy:
    @pytest.mark.parametrize("c", [0.5, 1.0, 3.0])
    def test_fractional_alpha_one_matches_constant_bitwise(self, c):
        frac, const = KernelSpec.fractional(c, 1.0), KernelSpec.constant(c)
        assert canonical(frac) == const
        g = TimeGrid.uniform(2.0, 64)
        t = g.nodes[1:]
        assert np.array_equal(eval_kernel(frac, t), eval_kernel(const, t))
        assert np.array_equal(kernel_primitive(frac, 0.0, t), kernel_primitive(const, 0.0, t))
        f = np.sin(g.nodes)
        assert np.array_equal(convolve_grid(frac, f, g), convolve_grid(const, f, g))
        assert np.array_equal(resolvent_second_kind(frac, g).values,
                              resolvent_second_kind(const, g).values)
        coeffs = RiccatiCoefficients(0.3, -1.0, 0.2)
        assert np.array_equal(solve_riccati(frac, coeffs, g).values,
                              solve_riccati(const, coeffs, g).values)

    def test_gamma_alpha_one_matches_exponential(self):
        g = TimeGrid.uniform(1.0, 32)
        a = resolvent_second_kind(KernelSpec.gamma(2.0, 1.0, 0.5), g)
        b = resolvent_second_kind(KernelSpec.exponential(2.0, 0.5), g)
        assert np.array_equal(a.values, b.values)
