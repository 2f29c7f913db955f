import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from roughmerton.errors import DegenerateRegressionError, DomainError, InsufficientDataError
from roughmerton.kernels import TimeGrid
from roughmerton.models import simulate_fbm
from roughmerton.roughness import estimate_hurst, fit_scaling, q_variation

GRID = TimeGrid.uniform(1.0, 4096)


@pytest.fixture(scope="module")
def fbm_paths():
    """25 paths x 4096 increments (about 1e5 samples) per Hurst value."""
    return {h: simulate_fbm(h, GRID, 25, seed=2024) for h in (0.1, 0.3, 0.5, 0.7)}


class TestQVariation:
    def test_constant_series(self):
        for q in (0.5, 1.0, 3.0):
            for lag in (1, 5):
                assert q_variation(np.full(50, 3.2), q, lag) == 0.0

    def test_alternating_series(self):
        assert q_variation(np.arange(100) % 2, 2.0, 1) == 1.0

    def test_self_similarity(self, fbm_paths):
        w = fbm_paths[0.3]
        ratio = q_variation(w, 2.0, 2) / q_variation(w, 2.0, 1)
        assert abs(ratio / 2 ** 0.6 - 1.0) < 0.10

    def test_pooling_never_crosses_rows(self):
        x = np.array([[0.0, 1.0, 2.0], [100.0, 101.0, 102.0]])
        assert q_variation(x, 1.0, 1) == 1.0

    def test_errors(self):
        with pytest.raises(InsufficientDataError):
            q_variation(np.arange(5.0), 2.0, 5)
        with pytest.raises(DomainError):
            q_variation(np.arange(5.0), 0.0, 1)
        with pytest.raises(DomainError):
            q_variation(np.arange(5.0), 1.0, 0)
        with pytest.raises(DomainError):
            q_variation([0.0, np.nan, 1.0], 1.0, 1)


class TestEstimateHurst:
    def test_noiseless_power_law(self):
        qs = [0.5, 1.0, 1.5, 2.0, 3.0]
        lags = list(range(1, 21))
        m = np.array([[d ** (0.4 * q) for d in lags] for q in qs])
        rep = fit_scaling(qs, lags, m)
        assert abs(rep.H_hat - 0.4) < 1e-12
        assert np.allclose(rep.zeta_q, 0.4 * np.array(qs), rtol=0, atol=1e-12)
        assert np.allclose(rep.fitted(), m, rtol=1e-12)

    def test_rough_fbm(self, fbm_paths):
        rep = estimate_hurst(fbm_paths[0.1])
        assert 0.08 <= rep.H_hat <= 0.12
        assert np.all(rep.m_qd > 0) and np.all(np.isfinite(rep.zeta_q))

    def test_brownian_motion(self, fbm_paths):
        assert 0.47 <= estimate_hurst(fbm_paths[0.5]).H_hat <= 0.53

    def test_monotone_in_generator(self, fbm_paths):
        est = [estimate_hurst(fbm_paths[h]).H_hat for h in (0.1, 0.3, 0.5, 0.7)]
        assert est == sorted(est)

    @given(shift=st.floats(-100.0, 100.0), scale=st.floats(0.01, 100.0), negate=st.booleans())
    def test_affine_invariance(self, shift, scale, negate):
        x = simulate_fbm(0.2, TimeGrid.uniform(1.0, 256), 2, seed=7)
        base = estimate_hurst(x, lags=range(1, 8))
        b = -scale if negate else scale
        moved = estimate_hurst(shift + b * x, lags=range(1, 8))
        assert abs(moved.H_hat - base.H_hat) < 1e-10
        assert np.allclose(moved.zeta_q, base.zeta_q, rtol=0, atol=1e-10)

    def test_errors(self):
        x = np.cumsum(np.random.default_rng(0).standard_normal(200))
        with pytest.raises(InsufficientDataError):
            estimate_hurst(x, qs=[1.0])
        with pytest.raises(InsufficientDataError):
            estimate_hurst(x, lags=[1, 2])
        with pytest.raises(InsufficientDataError):
            estimate_hurst(x[:5], lags=[1, 2, 10])
        with pytest.raises(DegenerateRegressionError):
            estimate_hurst(np.zeros(100))
        with pytest.raises(DegenerateRegressionError):
            fit_scaling([1.0, 2.0], [3, 3, 3], np.ones((2, 3)))
        with pytest.raises(DomainError):
            fit_scaling([1.0, 2.0], [1, 2, 3], np.ones((3, 3)))

    def test_exports(self, fbm_paths):
        rep = estimate_hurst(fbm_paths[0.5], qs=[1.0, 2.0], lags=[1, 2, 4])
        lines = rep.to_csv().splitlines()
        assert lines[0] == "q,lag,m,fitted"
        assert len(lines) == 1 + 6
        q, lag, m, fit = lines[1].split(",")
        assert float(q) == 1.0 and int(lag) == 1 and math.isclose(float(m), rep.m_qd[0, 0])
        summary = json.loads(rep.to_json())
        assert summary["H_hat"] == rep.H_hat
        assert len(summary["r2"]["per_q"]) == 2
