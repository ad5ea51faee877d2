import numpy as np
import pytest

import navcast.arima as arima
from navcast.arima import ArimaOrder, aic, deserialize, fit, forecast_one, residuals, select_order, serialize
from navcast.errors import DegenerateInputError
from conftest import as_series, random_walk, simulate_ar1, simulate_ma1


class TestFit:
    def test_random_walk_drift_closed_form(self):
        s = as_series(np.cumsum([2.0, 0.1, 0.3, -0.2, 0.5, 0.1]))
        m = fit(s, ArimaOrder(0, 1, 0))
        diffs = np.diff(s.values)
        assert m.intercept == pytest.approx(diffs.mean(), abs=1e-15)
        assert np.allclose(m.in_sample_residuals, diffs - diffs.mean())

    def test_ar1_recovery(self):
        s = as_series(simulate_ar1(0.6, 2000, seed=0))
        m = fit(s, ArimaOrder(1, 0, 0))
        assert 0.55 <= m.ar_coeffs[0] <= 0.65

    def test_ma1_recovery(self):
        s = as_series(simulate_ma1(0.5, 2000, seed=1))
        m = fit(s, ArimaOrder(0, 0, 1))
        assert 0.42 <= m.ma_coeffs[0] <= 0.58

    def test_ar_fit_matches_ols(self):
        # q=0 degenerates to a pure AR model solved by least squares.
        x = simulate_ar1(0.5, 500, seed=2)
        s = as_series(x)
        m = fit(s, ArimaOrder(2, 0, 0))
        z = x - x.mean()
        X = np.column_stack([z[1:-1], z[:-2]])
        ols = np.linalg.lstsq(X, z[2:], rcond=None)[0]
        assert np.allclose(m.ar_coeffs, ols, atol=1e-6)

    def test_residual_orthogonality(self):
        # OLS normal equations zero the residual-regressor inner products;
        # check the normalized (cosine) form of that orthogonality.
        x = simulate_ar1(0.7, 800, seed=3)
        s = as_series(x)
        m = fit(s, ArimaOrder(2, 0, 0))
        z = x - x.mean()
        eps = residuals(m, s)
        for lag in (1, 2):
            reg = z[2 - lag: len(z) - lag]
            cos = np.dot(eps, reg) / (np.linalg.norm(eps) * np.linalg.norm(reg))
            assert abs(cos) < 1e-6

    def test_too_short_rejected(self):
        with pytest.raises(DegenerateInputError):
            fit(as_series([1.0, 2.0, 3.0]), ArimaOrder(2, 1, 2))

    def test_sigma2_nonnegative(self):
        m = fit(as_series(simulate_ar1(0.4, 300, seed=4)), ArimaOrder(1, 0, 1))
        assert m.sigma2 >= 0


class TestAic:
    def test_identical_fits_identical_aic(self):
        s = as_series(simulate_ar1(0.5, 400, seed=5))
        assert aic(fit(s, ArimaOrder(1, 0, 0))) == aic(fit(s, ArimaOrder(1, 0, 0)))

    def test_overfit_penalized(self):
        wins = 0
        for seed in range(50):
            s = as_series(simulate_ar1(0.6, 1000, seed=seed))
            if aic(fit(s, ArimaOrder(3, 0, 0))) > aic(fit(s, ArimaOrder(1, 0, 0))):
                wins += 1
        assert wins >= 40  # >= 80% of 50 trials

    def test_nav_scale_differences_strongly_negative(self):
        rng = np.random.default_rng(6)
        s = as_series(2.0 + np.cumsum(rng.normal(0, 0.02, 900)))
        value = aic(fit(s, ArimaOrder(0, 1, 0)))
        assert value < -1000


class TestSelectOrder:
    def test_random_walk_gets_d1(self):
        s = as_series(2.0 + random_walk(1260, seed=7, sigma=0.02))
        assert select_order(s).chosen.d == 1

    def test_white_noise_majority_000(self):
        hits = 0
        for seed in range(50):
            s = as_series(np.random.default_rng(seed).normal(size=1000))
            ch = select_order(s, ArimaOrder(2, 1, 2)).chosen
            hits += (ch.p, ch.d, ch.q) == (0, 0, 0)
        assert hits > 25

    def test_ar1_order_recovered_70pct(self):
        # AIC over a CSS grid is not a consistent selector; this threshold is
        # above what AIC-based selection (ours or full-MLE references)
        # achieves on this protocol.  Kept at the stated level regardless.
        hits = 0
        for seed in range(50):
            s = as_series(simulate_ar1(0.6, 2000, seed=seed))
            ch = select_order(s).chosen
            hits += (ch.p, ch.d, ch.q) == (1, 0, 0)
        assert hits >= 35

    def test_chosen_minimal_aic_with_tiebreak(self):
        s = as_series(simulate_ar1(0.6, 600, seed=8))
        report = select_order(s, ArimaOrder(2, 0, 2))
        converged = [c for c in report.candidates if c[2]]
        best = min(converged, key=lambda c: (c[1], c[0].p + c[0].q, c[0].p))
        assert report.chosen == best[0]

    def test_grid_order_invariance(self):
        # Deterministic tie-break: two runs agree (grid is iterated the same
        # way, so this checks determinism of the whole search).
        s = as_series(simulate_ar1(0.3, 500, seed=9))
        r1 = select_order(s, ArimaOrder(2, 1, 2))
        r2 = select_order(s, ArimaOrder(2, 1, 2))
        assert r1.chosen == r2.chosen


class TestForecastOne:
    def test_pure_persistence(self):
        s = as_series([1.0, 1.1, 1.3, 1.234])
        m = fit(s, ArimaOrder(0, 1, 0))
        zero_drift = arima.ArimaModel(
            order=m.order, ar_coeffs=[], ma_coeffs=[], intercept=0.0,
            sigma2=m.sigma2, in_sample_residuals=m.in_sample_residuals, n_obs=m.n_obs,
        )
        assert forecast_one(zero_drift, s) == 1.234

    def test_drift(self):
        s = as_series([1.9, 1.95, 2.0])
        m = fit(s, ArimaOrder(0, 1, 0))
        drifted = arima.ArimaModel(
            order=m.order, ar_coeffs=[], ma_coeffs=[], intercept=0.002,
            sigma2=m.sigma2, in_sample_residuals=m.in_sample_residuals, n_obs=m.n_obs,
        )
        assert forecast_one(drifted, s) == pytest.approx(2.002, abs=1e-15)

    def test_ar1_hand_case(self):
        x = simulate_ar1(0.5, 200, seed=10)
        s = as_series(x)
        m = fit(s, ArimaOrder(1, 0, 0))
        mean = np.mean(x)
        phi = m.ar_coeffs[0]
        manual = mean + phi * (x[-1] - mean)
        assert forecast_one(m, s) == pytest.approx(manual, abs=1e-12)

    def test_shift_equivariance(self):
        x = 2.0 + random_walk(300, seed=11, sigma=0.05)
        s = as_series(x)
        m = fit(s, ArimaOrder(1, 1, 1))
        shifted = as_series(x + 5.0)
        m2 = fit(shifted, ArimaOrder(1, 1, 1))
        assert forecast_one(m2, shifted) == pytest.approx(forecast_one(m, s) + 5.0, abs=1e-9)

    def test_insufficient_history(self):
        s = as_series(simulate_ar1(0.5, 100, seed=12))
        m = fit(s, ArimaOrder(3, 0, 0))
        with pytest.raises(DegenerateInputError):
            forecast_one(m, as_series([1.0, 2.0]))


class TestResiduals:
    def test_noiseless_ar_process(self):
        # Deterministic zero-mean AR(2) recursion (sampled sinusoid over whole
        # periods): refitting recovers it and residuals vanish.
        omega = 2 * np.pi / 16
        x = np.sin(omega * np.arange(80))
        s = as_series(x)
        m = fit(s, ArimaOrder(2, 0, 0))
        assert np.allclose(m.ar_coeffs, [2 * np.cos(omega), -1.0], atol=1e-8)
        assert np.max(np.abs(residuals(m, s))) < 1e-10

    def test_random_walk_closed_form(self):
        s = as_series(2.0 + random_walk(100, seed=13, sigma=0.01))
        m = fit(s, ArimaOrder(0, 1, 0))
        diffs = np.diff(s.values)
        assert np.allclose(residuals(m, s), diffs - diffs.mean(), atol=1e-14)

    def test_variance_close_to_innovation(self):
        s = as_series(simulate_ar1(0.6, 2000, seed=14))
        m = fit(s, ArimaOrder(1, 0, 0))
        v = np.var(residuals(m, s))
        assert abs(v - 1.0) < 0.15

    def test_length_contract(self):
        s = as_series(simulate_ar1(0.5, 150, seed=15))
        m = fit(s, ArimaOrder(2, 0, 1))
        assert len(residuals(m, s)) == 150 - 2
        assert len(m.in_sample_residuals) == 150


class TestSerialization:
    def test_round_trip(self):
        s = as_series(simulate_ar1(0.6, 300, seed=16))
        m = fit(s, ArimaOrder(2, 0, 1))
        m2 = deserialize(serialize(m))
        assert m2.order == m.order
        assert np.array_equal(m2.ar_coeffs, m.ar_coeffs)
        assert np.array_equal(m2.ma_coeffs, m.ma_coeffs)
        assert m2.intercept == m.intercept
        assert m2.sigma2 == m.sigma2
        assert forecast_one(m2, s) == forecast_one(m, s)
