import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

import padlab as pl
from oracles import ks_distance


def texp_density(params):
    lam, l, M = params.lam, params.l, params.M
    norm = math.exp(-lam * l) - math.exp(-lam * M)
    return lambda z: lam * math.exp(-lam * z) / norm


class TestTexpClosedForms:
    def test_tail_against_numeric_integration(self):
        params = pl.TexpParams(1.0, 1.0, 3.0)
        oracle, _ = quad(texp_density(params), 2.0, 3.0)
        assert pl.texp_tail(params, 2.0) == pytest.approx(oracle, abs=1e-5)
        assert pl.texp_tail(params, 2.0) == pytest.approx(0.268941, abs=1e-5)

    def test_tail_endpoints(self):
        params = pl.TexpParams(0.7, 2.0, 9.0)
        assert pl.texp_tail(params, 2.0) == 1.0
        assert pl.texp_tail(params, 9.0) == 0.0

    def test_tail_rejects_outside_window(self):
        params = pl.TexpParams(1.0, 1.0, 3.0)
        for beta in (0.5, 3.5):
            with pytest.raises(ValueError):
                pl.texp_tail(params, beta)

    def test_tail_monotone_nonincreasing(self):
        params = pl.TexpParams(0.25, 1.0, 20.0)
        betas = np.linspace(1.0, 20.0, 200)
        vals = [pl.texp_tail(params, b) for b in betas]
        assert all(a >= b - 1e-15 for a, b in zip(vals, vals[1:]))

    def test_conditional_worked_example(self):
        params = pl.TexpParams(1.0, 1.0, 10.0)
        expected = (1 - math.exp(-1.0)) / (1 - math.exp(-8.0))
        assert pl.texp_conditional(params, 2.0, 1.0) == pytest.approx(expected, rel=1e-12)
        assert pl.texp_conditional(params, 2.0, 1.0) == pytest.approx(0.632332, abs=1e-5)

    def test_conditional_from_two_tails(self):
        # P[t <= a+b | t >= a] = 1 - tail(a+b)/tail(a), an independent route
        params = pl.TexpParams(0.3, 1.0, 12.0)
        a, b = 2.5, 3.0
        oracle = 1 - pl.texp_tail(params, a + b) / pl.texp_tail(params, a)
        assert pl.texp_conditional(params, a, b) == pytest.approx(oracle, rel=1e-10)

    def test_conditional_zero_beta(self):
        params = pl.TexpParams(1.0, 1.0, 10.0)
        assert pl.texp_conditional(params, 2.0, 0.0) == 0.0

    def test_conditional_rejects_bad_arguments(self):
        params = pl.TexpParams(1.0, 1.0, 10.0)
        with pytest.raises(ValueError):
            pl.texp_conditional(params, 0.5, 1.0)   # alpha below l
        with pytest.raises(ValueError):
            pl.texp_conditional(params, 2.0, 8.0)   # alpha + beta >= M

    def test_small_rate_stability(self):
        # tiny lam*(M-l) must not lose precision to cancellation
        params = pl.TexpParams(1e-9, 1.0, 2.0)
        oracle, _ = quad(texp_density(params), 1.5, 2.0)
        assert pl.texp_tail(params, 1.5) == pytest.approx(oracle, rel=1e-7)
        assert abs(pl.texp_tail(params, 1.5) - 0.5) < 1e-6


class TestTexpEstimateRegime:
    """Inside the regime (M-l)*lam >= 2, l*lam <= 1 the closed forms obey
    tail(beta) <= 4 exp(-lam beta) and conditional(alpha, beta) <= 2 lam beta."""

    PARAM_SETS = [(1.0, 10.0), (3.0, 50.0), (0.5, 20.0)]

    @pytest.mark.parametrize("l,M", PARAM_SETS)
    def test_tail_and_conditional_bounds(self, l, M):
        lams = np.linspace(2 / (M - l), 1 / l, 20)
        betas = np.linspace(l, M, 20)
        for lam in lams:
            params = pl.TexpParams(float(lam), l, M)
            assert params.in_estimate_regime
            for beta in betas:
                assert pl.texp_tail(params, float(beta)) <= 4 * math.exp(-lam * beta)
            for alpha in np.linspace(l, M / 2, 5):
                for beta in betas:
                    if alpha + beta >= M or beta < l:
                        continue
                    cond = pl.texp_conditional(params, float(alpha), float(beta))
                    assert cond <= 2 * lam * beta

    def test_regime_flag_recorded_not_enforced(self):
        out = pl.TexpParams(0.001, 1.0, 5.0)  # (M-l)lam far below 2
        assert not out.in_estimate_regime
        pl.texp_tail(out, 3.0)  # still evaluates


class TestTgeo:
    def test_pmf_worked_values(self):
        params = pl.TgeoParams(0.5, 5)
        assert pl.tgeo_pmf(params, 2) == 0.25
        assert pl.tgeo_pmf(params, 5) == 0.0625  # (1-p)^(M-1), tail mass at M

    def test_tail_worked_values(self):
        params = pl.TgeoParams(0.5, 5)
        assert pl.tgeo_tail(params, 3) == 0.25
        assert pl.tgeo_tail(params, 1) == 1.0

    @given(st.floats(0.01, 0.9), st.integers(2, 60))
    @settings(max_examples=100, deadline=None)
    def test_masses_sum_to_one(self, p, M):
        params = pl.TgeoParams(p, M)
        total = math.fsum(pl.tgeo_pmf(params, n) for n in range(1, M + 1))
        assert total == pytest.approx(1.0, abs=1e-12)

    @given(st.floats(0.01, 0.9), st.integers(2, 60), st.data())
    @settings(max_examples=100, deadline=None)
    def test_tail_equals_pmf_sum(self, p, M, data):
        params = pl.TgeoParams(p, M)
        n = data.draw(st.integers(1, M))
        oracle = math.fsum(pl.tgeo_pmf(params, k) for k in range(n, M + 1))
        assert pl.tgeo_tail(params, n) == pytest.approx(oracle, rel=1e-10)

    @given(st.floats(0.01, 0.9), st.integers(4, 60), st.data())
    @settings(max_examples=100, deadline=None)
    def test_conditional_equals_pmf_ratio(self, p, M, data):
        params = pl.TgeoParams(p, M)
        m = data.draw(st.integers(1, M - 3))
        n = data.draw(st.integers(1, M - m - 1))
        num = math.fsum(pl.tgeo_pmf(params, k) for k in range(m, m + n + 1))
        den = math.fsum(pl.tgeo_pmf(params, k) for k in range(m, M + 1))
        assert pl.tgeo_conditional(params, m, n) == pytest.approx(num / den, rel=1e-9)

    def test_conditional_worked_value(self):
        assert pl.tgeo_conditional(pl.TgeoParams(0.5, 5), 1, 1) == 0.75

    def test_conditional_small_p_first_order(self):
        params = pl.TgeoParams(1e-6, 100)
        n = 3
        val = pl.tgeo_conditional(params, 1, n)
        assert val < (n + 1) * 1e-6 + 1e-12

    def test_domain_validation(self):
        params = pl.TgeoParams(0.5, 5)
        with pytest.raises(ValueError):
            pl.tgeo_pmf(params, 0)
        with pytest.raises(ValueError):
            pl.tgeo_tail(params, 6)
        with pytest.raises(ValueError):
            pl.tgeo_conditional(params, 3, 2)  # m + n >= M


class TestSampling:
    def test_texp_inverse_transform_endpoints(self):
        params = pl.TexpParams(0.3, 2.0, 7.0)

        class Fixed:
            def __init__(self, u):
                self.u = u

            def random(self, size=None):
                return self.u if size is None else np.full(size, self.u)

        assert pl.sample_texp(params, Fixed(0.0)) == 2.0
        assert pl.sample_texp(params, Fixed(1.0 - 1e-16)) == pytest.approx(7.0, abs=1e-12)
        assert pl.sample_tgeo(pl.TgeoParams(0.3, 9), Fixed(0.0)) == 1
        assert pl.sample_tgeo(pl.TgeoParams(0.3, 9), Fixed(1.0 - 1e-16)) == 9

    def test_samples_stay_in_window(self):
        rng = np.random.default_rng(4)
        params = pl.TexpParams(0.1, 3.0, 50.0)
        s = pl.sample_texp(params, rng, 20000)
        assert s.min() >= 3.0 and s.max() <= 50.0
        g = pl.sample_tgeo(pl.TgeoParams(0.05, 100), rng, 20000)
        assert g.min() >= 1 and g.max() <= 100

    def test_texp_ks_distance_small(self):
        params = pl.TexpParams(0.1, 3.0, 50.0)
        s = pl.sample_texp(params, np.random.default_rng(0), 20000)
        assert ks_distance(s, lambda z: pl.texp_cdf(params, z)) < 0.02

    def test_tgeo_frequencies_match_pmf(self):
        params = pl.TgeoParams(0.05, 100)
        s = pl.sample_tgeo(params, np.random.default_rng(1), 20000)
        counts = np.bincount(s, minlength=101)
        for n in range(1, 101):
            pn = pl.tgeo_pmf(params, n)
            se = math.sqrt(pn * (1 - pn) / len(s))
            assert abs(counts[n] / len(s) - pn) <= 5 * se + 1e-9

    def test_deterministic_given_seed_and_index(self):
        params = pl.TexpParams(0.2, 1.0, 9.0)
        a = pl.sample_texp(params, np.random.default_rng(42), 50)
        b = pl.sample_texp(params, np.random.default_rng(42), 50)
        assert np.array_equal(a, b)

    def test_param_validation(self):
        with pytest.raises(ValueError):
            pl.TexpParams(0.0, 1.0, 2.0)
        with pytest.raises(ValueError):
            pl.TexpParams(1.0, 2.0, 2.0)
        with pytest.raises(ValueError):
            pl.TgeoParams(1.0, 5)
        with pytest.raises(ValueError):
            pl.TgeoParams(0.5, 1)
