import math

import numpy as np
import pytest

import crisisnet.regress as rg
from crisisnet.errors import DegenerateSampleError, SingularDesignError


def _line(n=50, slope=2.0, intercept=0.0):
    x = np.linspace(0.0, 10.0, n)
    return intercept + slope * x, x


class TestPolynomial:
    def test_exact_line(self):
        y, x = _line()
        fit = rg.fit_polynomial(y, x, 1)
        assert fit.coef == pytest.approx([0.0, 2.0], abs=1e-10)
        assert fit.sigma == pytest.approx(0.0, abs=1e-10)
        assert fit.rss < 1e-20

    def test_exact_quadratic(self):
        x = np.linspace(-3, 3, 40)
        y = 1 + x + x**2
        fit = rg.fit_polynomial(y, x, 2)
        assert fit.coef == pytest.approx([1.0, 1.0, 1.0], abs=1e-9)

    def test_monte_carlo_within_three_se(self):
        rng = np.random.default_rng(42)
        n = 10000
        x = rng.uniform(0, 100, n)
        y = 3.0 + 0.5 * x - 0.01 * x**2 + rng.normal(0, 1, n)
        fit = rg.fit_polynomial(y, x, 2)
        se = np.sqrt(np.diag(fit.cov))
        for est, truth, s in zip(fit.coef, [3.0, 0.5, -0.01], se):
            assert abs(est - truth) < 3 * s

    def test_quadratic_never_fits_worse(self):
        rng = np.random.default_rng(1)
        x = rng.uniform(0, 5, 200)
        y = 2 * x + rng.normal(0, 1, 200)
        lin = rg.fit_polynomial(y, x, 1)
        quad = rg.fit_polynomial(y, x, 2)
        assert quad.loglik >= lin.loglik - 1e-9
        assert quad.rss <= lin.rss + 1e-9

    def test_shift_equivariance(self):
        rng = np.random.default_rng(2)
        x = rng.uniform(0, 10, 300)
        y = 1 + 0.7 * x + rng.normal(0, 0.5, 300)
        a = rg.fit_polynomial(y, x, 1)
        b = rg.fit_polynomial(y, x + 100.0, 1)
        assert b.coef[1] == pytest.approx(a.coef[1], abs=1e-9)
        assert b.coef[0] == pytest.approx(a.coef[0] - 100.0 * a.coef[1], abs=1e-7)

    def test_constant_x_singular(self):
        with pytest.raises(SingularDesignError):
            rg.fit_polynomial(np.arange(10.0), np.full(10, 3.0), 1)

    def test_rejects_bad_order(self):
        y, x = _line()
        with pytest.raises(ValueError):
            rg.fit_polynomial(y, x, 3)

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            rg.fit_polynomial(np.array([1.0, 2.0]), np.array([0.0, 1.0]), 2)


class TestSelection:
    def test_linear_data_selects_linear(self):
        rng = np.random.default_rng(3)
        x = rng.uniform(0, 10, 500)
        y = 4 - 2 * x + rng.normal(0, 1, 500)
        lin = rg.fit_polynomial(y, x, 1)
        quad = rg.fit_polynomial(y, x, 2)
        assert rg.select_model(lin, quad).order == 1

    def test_curved_data_selects_quadratic(self):
        rng = np.random.default_rng(4)
        x = rng.uniform(0, 10, 500)
        y = 1 + x - 0.8 * x**2 + rng.normal(0, 1, 500)
        lin = rg.fit_polynomial(y, x, 1)
        quad = rg.fit_polynomial(y, x, 2)
        assert rg.select_model(lin, quad).order == 2

    def test_minimal_n_runs(self):
        x = np.array([0.0, 1.0, 2.0, 5.0])
        y = np.array([1.0, 2.0, 2.5, 7.0])
        lin = rg.fit_polynomial(y, x, 1)
        quad = rg.fit_polynomial(y, x, 2)
        rg.select_model(lin, quad)

    def test_lr_pvalue_range(self):
        rng = np.random.default_rng(5)
        x = rng.uniform(0, 10, 100)
        y = x + rng.normal(0, 1, 100)
        stat, p = rg.lr_test(rg.fit_polynomial(y, x, 1), rg.fit_polynomial(y, x, 2))
        assert stat >= 0.0 and 0.0 <= p <= 1.0


class TestBand:
    def test_zero_sigma_collapses(self):
        y, x = _line()
        band = rg.prediction_band(rg.fit_polynomial(y, x, 1), np.linspace(0, 10, 7))
        np.testing.assert_allclose(band.lo, band.mean, atol=1e-9)
        np.testing.assert_allclose(band.hi, band.mean, atol=1e-9)

    def test_narrowest_at_x_mean(self):
        rng = np.random.default_rng(6)
        x = rng.uniform(0, 10, 200)
        y = 2 * x + rng.normal(0, 1, 200)
        fit = rg.fit_polynomial(y, x, 1)
        grid = np.linspace(x.min(), x.max(), 101)
        band = rg.prediction_band(fit, grid)
        widths = band.hi - band.lo
        nearest = int(np.argmin(np.abs(grid - x.mean())))
        assert abs(int(np.argmin(widths)) - nearest) <= 1

    def test_grid_limited_to_observed_range(self):
        y, x = _line()
        fit = rg.fit_polynomial(y, x, 1)
        with pytest.raises(ValueError):
            rg.prediction_band(fit, np.array([100.0]))

    def test_coverage_of_true_mean(self):
        # nominal 95% band should cover the true mean at x=5 in >= 93% of reps
        hits = 0
        x = np.linspace(0, 10, 60)
        truth = 1.0 + 2.0 * 5.0
        for rep in range(500):
            rng = np.random.default_rng(1000 + rep)
            y = 1.0 + 2.0 * x + rng.normal(0, 1, len(x))
            band = rg.prediction_band(rg.fit_polynomial(y, x, 1), np.array([5.0]))
            hits += band.lo[0] <= truth <= band.hi[0]
        assert hits >= 0.93 * 500

    def test_csv_format(self, tmp_path):
        y, x = _line()
        band = rg.prediction_band(rg.fit_polynomial(y, x, 1), np.array([0.0, 5.0]))
        p = tmp_path / "band.csv"
        rg.write_band_csv(band, p)
        lines = p.read_text().splitlines()
        assert lines[0] == "x,mean,lo,hi"
        assert len(lines) == 3


def _censored_fixture(n, seed, beta=(1.0, 2.0, -0.5), sigma=3.0, censor=None):
    rng = np.random.default_rng(seed)
    X = np.column_stack([rng.normal(0, 1, n), rng.uniform(-2, 2, n)])
    latent = beta[0] + X @ np.array(beta[1:]) + sigma * rng.normal(0, 1, n)
    if censor is None:
        censor = float(np.quantile(latent, 0.4))  # ~40% censoring
    y = np.maximum(latent, censor)
    return y, X, censor


class TestTobit:
    def test_gradient_matches_finite_differences(self):
        y, X, censor = _censored_fixture(400, 7)
        Xd = np.column_stack([np.ones(len(y)), X])
        theta = np.array([0.5, 1.5, -0.2, math.log(2.5)])
        g = rg._tobit_grad(theta, y, Xd, censor)
        fd = np.empty_like(theta)
        h = 1e-6
        for i in range(len(theta)):
            e = np.zeros(len(theta))
            e[i] = h
            fd[i] = (
                rg._tobit_loglik(theta + e, y, Xd, censor)
                - rg._tobit_loglik(theta - e, y, Xd, censor)
            ) / (2 * h)
        rel = np.abs(g - fd) / np.maximum(1.0, np.abs(fd))
        assert rel.max() < 1e-6

    def test_zero_censoring_matches_ols(self):
        rng = np.random.default_rng(8)
        n = 2000
        X = rng.normal(0, 1, (n, 2))
        y = 1.0 + X @ np.array([2.0, -0.5]) + rng.normal(0, 1.5, n)
        censor = float(y.min()) - 1.0
        tob = rg.fit_tobit(y, X, censor)
        assert tob.n_censored == 0
        Xd = np.column_stack([np.ones(n), X])
        ols = np.linalg.lstsq(Xd, y, rcond=None)[0]
        np.testing.assert_allclose(tob.beta, ols, atol=1e-6)
        resid = y - Xd @ ols
        sigma_mle = math.sqrt(float(resid @ resid) / n)
        assert tob.sigma == pytest.approx(sigma_mle, abs=1e-6)

    def test_recovery_within_two_se(self):
        y, X, censor = _censored_fixture(20000, 14)
        tob = rg.fit_tobit(y, X, censor)
        for est, truth, se in zip(tob.beta, [1.0, 2.0, -0.5], tob.se):
            assert abs(est - truth) < 2 * se
        assert abs(tob.sigma - 3.0) < 2 * tob.sigma_se
        assert 0.3 < tob.n_censored / tob.n < 0.5

    def test_loglik_trace_monotone(self):
        y, X, censor = _censored_fixture(800, 10)
        tob = rg.fit_tobit(y, X, censor)
        lls = [ll for _, ll, _ in tob.trace]
        assert all(b >= a - 1e-9 for a, b in zip(lls, lls[1:]))
        assert tob.loglik == pytest.approx(lls[-1])

    def test_all_censored_raises(self):
        y = np.full(50, 2.0)
        X = np.random.default_rng(0).normal(0, 1, (50, 1))
        with pytest.raises(DegenerateSampleError):
            rg.fit_tobit(y, X, censor_left=2.0)

    def test_constant_column_raises(self):
        rng = np.random.default_rng(11)
        y = rng.normal(10, 1, 100)
        X = np.column_stack([rng.normal(0, 1, 100), np.full(100, 4.0)])
        with pytest.raises(SingularDesignError):
            rg.fit_tobit(y, X, censor_left=0.0)

    def test_collinear_columns_raise(self):
        rng = np.random.default_rng(12)
        a = rng.normal(0, 1, 100)
        y = rng.normal(10, 1, 100)
        with pytest.raises(SingularDesignError):
            rg.fit_tobit(y, np.column_stack([a, 2.0 * a]), censor_left=0.0)

    def test_names_and_ci_shape(self):
        y, X, censor = _censored_fixture(500, 13)
        tob = rg.fit_tobit(y, X, censor, names=["alpha", "beta2"])
        assert tob.names == ["const", "alpha", "beta2"]
        assert np.all(tob.ci_lower < tob.ci_upper)
        assert tob.pseudo_r2 > 0.0
        # CI at the default level reproduces beta +- z*se
        np.testing.assert_allclose(
            tob.ci_upper - tob.beta, rg.Z_95 * tob.se, rtol=1e-12
        )


class TestDescribe:
    def test_constant_column_sd_zero(self):
        rows = rg.describe({"c": np.full(9, 3.5)})
        assert rows[0]["sd"] == 0.0
        assert rows[0]["mean"] == 3.5

    def test_moments(self):
        rows = rg.describe({"v": np.array([1.0, 2.0, 3.0, 4.0])})
        (row,) = rows
        assert row["n"] == 4
        assert row["mean"] == pytest.approx(2.5)
        assert row["sd"] == pytest.approx(np.std([1, 2, 3, 4], ddof=1))
        assert row["min"] == 1.0 and row["max"] == 4.0

    def test_preserves_order(self):
        rows = rg.describe({"b": np.ones(3), "a": np.zeros(3)})
        assert [r["name"] for r in rows] == ["b", "a"]
