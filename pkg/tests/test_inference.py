import math

import numpy as np
import pytest
from scipy import integrate, optimize

from herdcluster import (
    DegenerateInputError,
    ValidationError,
    f_cdf,
    ln_gamma,
    one_way_anova,
    reg_inc_beta,
    studentized_range_cdf,
    studentized_range_ppf,
    tukey_hsd,
)


def f_cdf_oracle(x, d1, d2):
    """Adaptive quadrature of the F density (independent of the
    incomplete-beta route used by the implementation)."""

    def density(t):
        if t <= 0:
            return 0.0
        log_pdf = (
            math.lgamma((d1 + d2) / 2) - math.lgamma(d1 / 2) - math.lgamma(d2 / 2)
            + (d1 / 2) * math.log(d1 / d2) + (d1 / 2 - 1) * math.log(t)
            - ((d1 + d2) / 2) * math.log(1 + d1 * t / d2)
        )
        return math.exp(log_pdf)

    val, _ = integrate.quad(density, 0, x, limit=200)
    return val


def studentized_range_cdf_oracle(q, k, df):
    """Double adaptive quadrature of the studentized range probability."""

    def inner(u):
        def loc(z):
            phi = math.exp(-z * z / 2) / math.sqrt(2 * math.pi)
            upper = 0.5 * (1 + math.erf(z / math.sqrt(2)))
            lower = 0.5 * (1 + math.erf((z - q * u) / math.sqrt(2)))
            return phi * (upper - lower) ** (k - 1)

        val, _ = integrate.quad(loc, -9, 9, limit=200)
        return k * val

    def outer(u):
        log_dens = (
            (df / 2) * math.log(df) - math.lgamma(df / 2)
            - (df / 2 - 1) * math.log(2)
            + (df - 1) * math.log(u) - df * u * u / 2
        )
        return math.exp(log_dens) * inner(u)

    hi = 1 + 10 / math.sqrt(df)
    val, _ = integrate.quad(outer, 1e-12, hi, limit=200)
    return val


class TestLnGamma:
    def test_factorial_identities(self):
        assert ln_gamma(1.0) == pytest.approx(0.0, abs=1e-14)
        assert ln_gamma(5.0) == pytest.approx(math.log(24), rel=1e-14)
        assert ln_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), rel=1e-13)

    def test_recurrence(self):
        for x in (0.7, 1.3, 4.2, 17.5, 63.0):
            assert ln_gamma(x + 1) == pytest.approx(
                ln_gamma(x) + math.log(x), rel=1e-12
            )

    def test_relative_accuracy_across_domain(self):
        for x in np.linspace(0.5, 100, 250):
            ref = math.lgamma(x)
            err = abs(ln_gamma(float(x)) - ref)
            assert err <= 1e-12 * max(1.0, abs(ref))

    def test_domain_violation(self):
        with pytest.raises(ValidationError):
            ln_gamma(0.0)
        with pytest.raises(ValidationError):
            ln_gamma(-2.5)


class TestRegIncBeta:
    def test_uniform_case(self):
        for x in (0.0, 0.2, 0.5, 0.77, 1.0):
            assert reg_inc_beta(x, 1, 1) == pytest.approx(x, abs=1e-14)

    def test_reflection_identity(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            a, b = rng.uniform(0.1, 20, size=2)
            x = rng.random()
            total = reg_inc_beta(x, a, b) + reg_inc_beta(1 - x, b, a)
            assert total == pytest.approx(1.0, abs=1e-12)

    def test_endpoints(self):
        assert reg_inc_beta(0.0, 3, 4) == 0.0
        assert reg_inc_beta(1.0, 3, 4) == 1.0

    def test_half_integer_closed_form(self):
        # I_x(1/2, 1/2) = (2/pi) arcsin(sqrt(x))
        for x in (0.1, 0.35, 0.8):
            assert reg_inc_beta(x, 0.5, 0.5) == pytest.approx(
                2 / math.pi * math.asin(math.sqrt(x)), abs=1e-13
            )

    def test_domain_violations(self):
        with pytest.raises(ValidationError):
            reg_inc_beta(1.5, 1, 1)
        with pytest.raises(ValidationError):
            reg_inc_beta(0.5, -1, 1)


class TestFCdf:
    def test_limits(self):
        assert f_cdf(0.0, 3, 7) == 0.0
        assert f_cdf(math.inf, 3, 7) == 1.0
        assert f_cdf(1e9, 3, 7) == pytest.approx(1.0, abs=1e-9)

    def test_symmetry_at_one_for_equal_df(self):
        for d in (1, 2, 5, 20):
            assert f_cdf(1.0, d, d) == pytest.approx(0.5, abs=1e-13)

    def test_anova_example_point(self):
        assert f_cdf(16, 1, 2) == pytest.approx(0.9428090415820632, abs=1e-10)

    def test_against_quadrature_oracle(self):
        for d1 in (1, 2, 4, 10):
            for d2 in (1, 3, 8, 25):
                for x in (0.2, 0.7, 1.5, 4.0):
                    assert f_cdf(x, d1, d2) == pytest.approx(
                        f_cdf_oracle(x, d1, d2), abs=1e-8
                    )

    def test_negative_x(self):
        with pytest.raises(ValidationError):
            f_cdf(-0.1, 2, 2)


class TestStudentizedRangeCdf:
    def test_zero(self):
        assert studentized_range_cdf(0.0, 3, 10) == 0.0

    def test_monotone_in_q_and_k(self):
        qs = np.linspace(0.2, 6, 12)
        vals = [studentized_range_cdf(float(q), 3, 20) for q in qs]
        assert all(b > a for a, b in zip(vals, vals[1:]))
        for q in (1.0, 2.5, 4.0):
            by_k = [studentized_range_cdf(q, k, 20) for k in (2, 3, 5, 8)]
            assert all(b < a for a, b in zip(by_k, by_k[1:]))

    def test_against_quadrature_oracle(self):
        for k, df, q in [(2, 5, 1.5), (3, 20, 3.578), (4, 10, 2.0), (6, 30, 4.5)]:
            assert studentized_range_cdf(q, k, df) == pytest.approx(
                studentized_range_cdf_oracle(q, k, df), abs=1e-6
            )

    def test_inverse_against_bisection_oracle(self):
        q_oracle = optimize.brentq(
            lambda q: studentized_range_cdf_oracle(q, 3, 20) - 0.95, 2.0, 6.0,
            xtol=1e-10,
        )
        assert q_oracle == pytest.approx(3.578, abs=5e-3)
        assert studentized_range_ppf(0.95, 3, 20) == pytest.approx(
            q_oracle, abs=5e-3
        )

    def test_invalid_parameters(self):
        with pytest.raises(ValidationError):
            studentized_range_cdf(1.0, 1, 10)
        with pytest.raises(ValidationError):
            studentized_range_cdf(1.0, 3, 0)
        with pytest.raises(ValidationError):
            studentized_range_cdf(-1.0, 3, 10)


class TestOneWayAnova:
    def test_equal_group_means(self):
        r = one_way_anova([1, 2, 3, 1, 2, 3], [1, 1, 1, 2, 2, 2])
        assert r.f_stat == pytest.approx(0.0, abs=1e-12)
        assert r.p_value == pytest.approx(1.0, abs=1e-12)

    def test_two_group_example(self):
        # SS_between = 16, SS_within = 1, df = (1, 2)
        r = one_way_anova([1, 2, 5, 6], [1, 1, 2, 2])
        assert r.f_stat == pytest.approx(32.0, rel=1e-12)
        assert (r.df_between, r.df_within) == (1, 2)
        assert r.p_value == pytest.approx(1 - f_cdf_oracle(32, 1, 2), abs=1e-8)
        assert r.group_means == (1.5, 5.5)
        assert r.grand_mean == 3.5

    def test_degenerate_zero_within_variance(self):
        r = one_way_anova([1, 1, 5, 5], [1, 1, 2, 2])
        assert r.degenerate
        assert r.p_value == 0.0

    def test_degenerate_all_equal(self):
        r = one_way_anova([4, 4, 4, 4], [1, 1, 2, 2])
        assert r.degenerate
        assert r.f_stat == 0.0
        assert r.p_value == 1.0

    def test_fewer_than_two_groups(self):
        with pytest.raises(ValidationError, match="at least 2 groups"):
            one_way_anova([1, 2, 3], [1, 1, 1])

    def test_n_must_exceed_k(self):
        with pytest.raises(ValidationError, match="more observations"):
            one_way_anova([1.0, 2.0], [1, 2])

    def test_sum_of_squares_decomposition(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            n = int(rng.integers(6, 40))
            k = int(rng.integers(2, 5))
            labels = np.concatenate([np.arange(1, k + 1), rng.integers(1, k + 1, n - k)])
            values = rng.normal(size=n)
            r = one_way_anova(values, labels)
            ss_total = float(((values - values.mean()) ** 2).sum())
            groups = [values[labels == g] for g in range(1, k + 1)]
            ssb = sum(g.size * (g.mean() - values.mean()) ** 2 for g in groups)
            ssw = sum(((g - g.mean()) ** 2).sum() for g in groups)
            assert ssb + ssw == pytest.approx(ss_total, rel=1e-9)
            expected_f = (ssb / r.df_between) / (ssw / r.df_within)
            assert r.f_stat == pytest.approx(expected_f, rel=1e-9)

    def test_affine_invariance(self):
        rng = np.random.default_rng(6)
        values = rng.normal(size=20)
        labels = rng.integers(1, 4, size=20)
        base = one_way_anova(values, labels)
        for a, b in [(2.5, 10), (-3, 4), (0.01, -7)]:
            r = one_way_anova(a * values + b, labels)
            assert r.f_stat == pytest.approx(base.f_stat, rel=1e-9)


class TestTukeyHsd:
    def test_identical_groups(self):
        r = tukey_hsd([1, 2, 3, 1, 2, 3], [1, 1, 1, 2, 2, 2])
        (pair,) = r.pairs
        assert pair.mean_diff == 0.0
        assert pair.p_adj == pytest.approx(1.0, abs=1e-9)
        assert not pair.reject_at_alpha

    def test_one_far_group(self, rng):
        a = rng.normal(size=10)
        b = rng.normal(size=10)
        c = rng.normal(size=10) + 100
        values = np.concatenate([a, b, c])
        labels = np.repeat([1, 2, 3], 10)
        r = tukey_hsd(values, labels)
        decisions = {(p.group_a, p.group_b): p.reject_at_alpha for p in r.pairs}
        assert decisions[(1, 3)] and decisions[(2, 3)]
        assert not decisions[(1, 2)]

    def test_unequal_sizes_uses_kramer_se(self):
        values = np.array([1.0, 2.0, 3.0, 10.0, 11.0])
        labels = np.array([1, 1, 1, 2, 2])
        r = tukey_hsd(values, labels)
        (pair,) = r.pairs
        ms_within = r.ms_within
        se = math.sqrt(ms_within / 2 * (1 / 3 + 1 / 2))
        assert pair.q_stat == pytest.approx(abs(pair.mean_diff) / se, rel=1e-12)

    def test_two_group_matches_anova_decision(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            n = int(rng.integers(3, 12))
            values = np.concatenate([rng.normal(size=n), rng.normal(size=n) + 1])
            labels = np.repeat([1, 2], n)
            anova = one_way_anova(values, labels)
            tukey = tukey_hsd(values, labels)
            (pair,) = tukey.pairs
            assert pair.q_stat**2 == pytest.approx(2 * anova.f_stat, rel=1e-9)
            assert pair.p_adj == pytest.approx(anova.p_value, abs=1e-7)
            for alpha in (0.01, 0.05, 0.1, 0.5):
                if abs(anova.p_value - alpha) > 1e-6:
                    assert (pair.p_adj < alpha) == (anova.p_value < alpha)

    def test_zero_within_variance(self):
        with pytest.raises(DegenerateInputError):
            tukey_hsd([1, 1, 2, 2], [1, 1, 2, 2])

    def test_text_and_json_output(self, tmp_path):
        r = tukey_hsd([1, 2, 5, 6, 9, 10], [1, 1, 2, 2, 3, 3])
        text = r.to_text()
        assert len(text.splitlines()) == 4  # header + 3 pairs
        r.to_json(tmp_path / "t.json")
        import json

        doc = json.loads((tmp_path / "t.json").read_text())
        assert len(doc["pairs"]) == 3
        assert doc["alpha"] == 0.05

    def test_invalid_alpha(self):
        with pytest.raises(ValidationError, match="alpha"):
            tukey_hsd([1, 2, 3, 4], [1, 1, 2, 2], alpha=1.5)
