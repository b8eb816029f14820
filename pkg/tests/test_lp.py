from dataclasses import replace
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpboot.dgp import Series, generate_shocks, paper_design, simulate_ar1
from lpboot.errors import DegenerateVariance, DomainError, HorizonTooLarge, SingularDesign
from lpboot.lp import (
    SeKind,
    fit_lp,
    hc_standard_errors,
    impulse_response,
    lp_fit_batch,
    rho_hat_full,
    root,
)
from lpboot.numerics import ks_distance
from lpboot.rng import RngStream


def lp_oracle(y, h):
    """Exact rational LP fit on the (y_t, y_{t-1}) design."""
    y = [Fraction(float(v)) for v in y]
    n = len(y) - 1
    rows = [(y[t], y[t - 1], y[t + h]) for t in range(1, n - h + 1)]
    a = sum(r[0] * r[0] for r in rows)
    b = sum(r[0] * r[1] for r in rows)
    c = sum(r[1] * r[1] for r in rows)
    r1 = sum(r[0] * r[2] for r in rows)
    r2 = sum(r[1] * r[2] for r in rows)
    det = a * c - b * b
    beta = (c * r1 - b * r2) / det
    gamma = (a * r2 - b * r1) / det
    return float(beta), float(gamma)


def random_series(seed, n=None, rho=None):
    gen = np.random.default_rng(seed)
    n = n or int(gen.integers(10, 120))
    rho = gen.uniform(-1, 1) if rho is None else rho
    return simulate_ar1(rho, gen.standard_t(5, size=n))


class TestFitExamples:
    def test_geometric_path_from_zero(self):
        # y_0 = 0 breaks the collinearity of the later rows
        y = np.concatenate([[0.0], 0.9 ** np.arange(12)])
        fit = fit_lp(Series(y), 1)
        assert fit.beta_hat == pytest.approx(0.9, abs=1e-12)
        assert fit.gamma_hat == pytest.approx(0.0, abs=1e-12)

    def test_collinear_design_raises(self):
        y = 0.9 ** np.arange(13)
        with pytest.raises(SingularDesign):
            fit_lp(Series(y), 1)

    def test_zero_series_raises(self):
        with pytest.raises(SingularDesign):
            fit_lp(Series(np.zeros(20)), 2)

    def test_exact_two_lag_relation(self):
        y = [0.0, 1.0, -0.7]
        for _ in range(30):
            y.append(0.5 * y[-2] + 0.25 * y[-3])
        fit = fit_lp(Series(y), 2)
        assert fit.beta_hat == pytest.approx(0.5, abs=1e-10)
        assert fit.gamma_hat == pytest.approx(0.25, abs=1e-10)
        np.testing.assert_allclose(fit.xi_resid, 0, atol=1e-12)

    def test_eight_point_oracle(self):
        y = np.random.default_rng(8).normal(size=8)
        fit = fit_lp(Series(y), 1)
        beta, gamma = lp_oracle(y, 1)
        assert fit.beta_hat == pytest.approx(beta, abs=1e-10)
        assert fit.gamma_hat == pytest.approx(gamma, abs=1e-10)

    @pytest.mark.parametrize("h", [1, 3, 6, 12])
    def test_random_oracle(self, h):
        for seed in range(20):
            s = random_series(seed, n=40)
            beta, gamma = lp_oracle(s.y, h)
            fit = fit_lp(s, h)
            assert fit.beta_hat == pytest.approx(beta, rel=1e-9, abs=1e-10)
            assert fit.gamma_hat == pytest.approx(gamma, rel=1e-9, abs=1e-10)

    def test_rho_hat_h_uses_truncated_sample(self):
        s = random_series(3, n=30)
        y = s.y
        h = 5
        expected = np.dot(y[1:26], y[:25]) / np.dot(y[:25], y[:25])
        fit = fit_lp(s, h)
        assert fit.rho_hat_h == pytest.approx(expected, rel=1e-13)
        np.testing.assert_allclose(fit.u_resid_h, y[1:26] - expected * y[:25], rtol=1e-12, atol=1e-13)

    def test_vector_lengths(self):
        s = random_series(4, n=50)
        fit = fit_lp(s, 7)
        for v in (fit.xi_resid, fit.u_resid_h, fit.leverage):
            assert len(v) == 43

    def test_horizon_limits(self):
        s = random_series(5, n=10)
        fit_lp(s, 7)
        with pytest.raises(HorizonTooLarge):
            fit_lp(s, 8)
        with pytest.raises(DomainError):
            fit_lp(s, 0)

    def test_batch_matches_single(self):
        series = [random_series(seed, n=60) for seed in range(5)]
        batch = lp_fit_batch(np.array([s.y for s in series]), 4)
        for i, s in enumerate(series):
            fit = fit_lp(s, 4)
            assert batch.beta[i] == fit.beta_hat
            assert batch.se(SeKind.HC3)[i] == fit.se_hc3

    def test_batch_marks_singular_rows(self):
        Y = np.vstack([random_series(1, n=30).y, np.zeros(31)])
        batch = lp_fit_batch(Y, 2)
        assert list(batch.singular) == [False, True]
        assert np.isnan(batch.beta[1]) and np.isfinite(batch.beta[0])


class TestStandardErrors:
    def test_constant_vectors(self):
        m, c, d = 9, 0.7, -2.0
        se = hc_standard_errors(np.full(m, c), np.full(m, d))
        assert se[0] == pytest.approx(abs(c) / (abs(d) * np.sqrt(m)), rel=1e-14)

    def test_zero_leverage_collapses(self):
        gen = np.random.default_rng(1)
        hc, hc2, hc3 = hc_standard_errors(gen.normal(size=10), gen.normal(size=10), np.zeros(10))
        assert hc == hc2 == hc3

    def test_ten_point_high_precision_oracle(self):
        gen = np.random.default_rng(10)
        xi, u = gen.normal(size=10), gen.normal(size=10)
        lev = gen.uniform(0, 0.6, size=10)
        mpmath.mp.dps = 40
        suu = mpmath.fsum(mpmath.mpf(x) ** 2 for x in u)

        def oracle(power):
            mid = mpmath.fsum(mpmath.mpf(a) ** 2 * mpmath.mpf(b) ** 2 / (1 - mpmath.mpf(p)) ** power
                              for a, b, p in zip(xi, u, lev))
            return float(mpmath.sqrt(mid) / suu)

        got = hc_standard_errors(xi, u, lev)
        for value, power in zip(got, (0, 1, 2)):
            assert value == pytest.approx(oracle(power), rel=1e-13)

    def test_degenerate(self):
        with pytest.raises(DegenerateVariance):
            hc_standard_errors(np.ones(4), np.zeros(4))

    def test_fit_uses_same_formula(self):
        fit = fit_lp(random_series(11, n=80), 3)
        got = hc_standard_errors(fit.xi_resid, fit.u_resid_h, fit.leverage)
        np.testing.assert_allclose(got, (fit.se_hc, fit.se_hc2, fit.se_hc3), rtol=1e-12)

    def test_leverage_matches_hat_matrix_of_original_design(self):
        s = random_series(12, n=40)
        h = 3
        y = s.y
        m = s.n - h
        X = np.column_stack([y[1:m + 1], y[:m]])
        P = X @ np.linalg.solve(X.T @ X, X.T)
        np.testing.assert_allclose(fit_lp(s, h).leverage, np.diag(P), rtol=1e-10, atol=1e-13)


class TestRhoHatFull:
    def test_deterministic_path(self):
        y = np.concatenate([[0.0], 0.8 ** np.arange(10)])
        assert rho_hat_full(Series(y)) == pytest.approx(0.8, abs=1e-15)

    @pytest.mark.parametrize("c", [1.0, -3.5, 1e-8])
    def test_two_points_is_undefined(self, c):
        # the only lag is y_0 = 0, so the ratio is 0/0
        with pytest.raises(SingularDesign):
            rho_hat_full(Series([0.0, c]))

    def test_hand_example(self):
        assert rho_hat_full(Series([0.0, 1.0, 1.0, 2.0])) == 1.5

    def test_zero_regressor(self):
        with pytest.raises(SingularDesign):
            rho_hat_full(Series([0.0, 0.0, 0.0]))


class TestRoot:
    def test_at_estimate(self):
        fit = fit_lp(random_series(13), 1)
        assert root(fit, fit.beta_hat).value == 0.0

    def test_arithmetic(self):
        fit = fit_lp(random_series(14, n=50), 1)
        fit = replace(fit, beta_hat=1.2, se_hc=0.1)
        assert root(fit, 1.0).value == pytest.approx(2.0, abs=1e-14)

    def test_scale_by_17(self):
        s = random_series(15, n=60)
        a = root(fit_lp(s, 4), 0.3, SeKind.HC2).value
        b = root(fit_lp(s.scaled(17.0), 4), 0.3, SeKind.HC2).value
        assert b == pytest.approx(a, abs=1e-12)

    def test_zero_se(self):
        fit = fit_lp(random_series(16, n=50), 1)
        with pytest.raises(DegenerateVariance):
            root(replace(fit, se_hc=0.0), 0.0)


class TestImpulseResponse:
    @pytest.mark.parametrize("h", [0, 1, 18, 1000])
    def test_unit_root(self, h):
        assert impulse_response(1.0, h) == 1.0

    def test_zero(self):
        assert impulse_response(0.0, 3) == 0.0

    def test_known_value(self):
        assert impulse_response(0.95, 6) == pytest.approx(0.7350918906, abs=1e-10)

    def test_negative_horizon(self):
        with pytest.raises(DomainError):
            impulse_response(0.5, -1)


class TestProperties:
    @pytest.mark.parametrize("c", [17.0, 1e-3, -1.0, -250.0])
    def test_scale_and_sign_invariance(self, c):
        gen = np.random.default_rng(20)
        for i in range(200):
            s = random_series(1000 + i)
            h = int(gen.integers(1, min(19, s.n - 3) + 1))
            a, b = fit_lp(s, h), fit_lp(s.scaled(c), h)
            for name in ("beta_hat", "gamma_hat", "rho_hat_h", "se_hc", "se_hc2", "se_hc3"):
                assert getattr(b, name) == pytest.approx(getattr(a, name), rel=1e-10, abs=1e-10), name
            np.testing.assert_allclose(b.leverage, a.leverage, rtol=1e-10, atol=1e-10)
            assert rho_hat_full(s.scaled(c)) == pytest.approx(rho_hat_full(s), rel=1e-10, abs=1e-10)
            assert root(b, 0.5).value == pytest.approx(root(a, 0.5).value, rel=1e-10, abs=1e-10)

    def test_orthogonality_leverage_and_se_order(self):
        gen = np.random.default_rng(21)
        for i in range(500):
            s = random_series(5000 + i)
            h = int(gen.integers(1, min(19, s.n - 3) + 1))
            fit = fit_lp(s, h)
            m = s.n - h
            y = s.y
            for x in (y[1:m + 1], y[:m]):
                scale = np.linalg.norm(x) * max(np.linalg.norm(fit.xi_resid), 1e-12 * np.linalg.norm(y))
                assert abs(x @ fit.xi_resid) <= 1e-8 * scale
            assert fit.leverage.sum() == pytest.approx(2.0, abs=1e-8)
            assert np.all(fit.leverage >= 0) and np.all(fit.leverage < 1)
            assert fit.se_hc3 >= fit.se_hc2 >= fit.se_hc > 0

    @given(st.integers(0, 10**6), st.integers(1, 10))
    @settings(max_examples=100, deadline=None)
    def test_leverage_trace_hypothesis(self, seed, h):
        s = random_series(seed, n=30)
        assert fit_lp(s, h).leverage.sum() == pytest.approx(2.0, abs=1e-8)

    @pytest.mark.slow
    def test_root_is_close_to_normal(self):
        # rho = 0, h = 1, n = 5000, 2000 replications
        root_stream = RngStream(2024)
        d = paper_design(1, burn_in=0)
        shocks = np.array([generate_shocks(d, 5000, root_stream.child(r)) for r in range(2000)])
        Y = np.zeros((2000, 5001))
        Y[:, 1:] = shocks
        batch = lp_fit_batch(Y, 1)
        roots = batch.beta / batch.se_hc
        assert ks_distance(roots) < 0.035
