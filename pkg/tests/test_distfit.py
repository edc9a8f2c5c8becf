import math
import warnings

import numpy as np
import pytest
from sklearn.base import clone

from deplen.distfit import (
    GEOMETRIC_BOUNDS,
    ZETA_BOUNDS,
    BoundaryWarning,
    FitResult,
    TruncatedGeometric,
    TruncatedZeta,
    TwoRegimeGeometric,
    compare,
    fit_counts,
    fit_geometric,
    fit_two_regime,
    fit_zeta,
    golden_section_max,
    sample_from_pmf,
    sample_truncated_geometric,
    sample_truncated_zeta,
    to_histogram,
    truncated_geometric_logpmf,
    truncated_zeta_logpmf,
    two_regime_pmf,
)
from deplen.exceptions import ComparisonError, NoDataError
from deplen.null_models import exact_null, substream

TWO_REGIME_TRUTH = dict(q1=0.4, q2=0.8, b=5, weight=0.75, d_max=20)


def quiet(fn, *args, **kwargs):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundaryWarning)
        return fn(*args, **kwargs)


def result(family, ll, n=100, d_max=10):
    return FitResult(family, {}, (1, d_max), ll, 2 * {"geometric": 1, "zeta": 1}.get(family, 3) - 2 * ll, n)


class TestPmfs:
    @pytest.mark.parametrize("logpmf, x", [
        (truncated_geometric_logpmf, 0.3), (truncated_geometric_logpmf, 1 - 1e-6),
        (truncated_zeta_logpmf, 2.0), (truncated_zeta_logpmf, 1e-6),
    ])
    def test_normalised(self, logpmf, x):
        for d_max in (1, 2, 50, 400):
            assert np.exp(logpmf(x, d_max)).sum() == pytest.approx(1.0, abs=1e-12)

    def test_two_regime_normalised(self):
        p = two_regime_pmf(0.4, 0.8, 5, 0.75, 20)
        assert p.sum() == pytest.approx(1.0, abs=1e-12)
        assert p[:5].sum() == pytest.approx(0.75, abs=1e-12)

    def test_samplers_stay_in_support(self):
        rng = substream(0)
        assert set(sample_truncated_geometric(0.9, 4, 2000, rng)) == {1, 2, 3, 4}
        assert sample_truncated_zeta(1.0, 7, 2000, rng).max() <= 7
        assert set(sample_from_pmf([0, 1, 0], 20, rng)) == {2}


def test_golden_section_quadratic():
    assert golden_section_max(lambda x: -(x - 0.3) ** 2, 0, 1) == pytest.approx(0.3, abs=1e-9)


class TestHistogram:
    def test_weights(self):
        counts, d_max = to_histogram([1, 3], 4, sample_weight=[2, 5])
        assert d_max == 4 and counts.tolist() == [2, 0, 5, 0]

    @pytest.mark.parametrize("X, d_max", [([0, 1], 3), ([1, 5], 4), ([1.5], 3)])
    def test_rejects_bad_values(self, X, d_max):
        with pytest.raises(ValueError):
            to_histogram(X, d_max)

    def test_empty(self):
        with pytest.raises(NoDataError):
            fit_geometric([], 4)
        with pytest.raises(NoDataError):
            fit_zeta([], 4)


class TestBoundaries:
    def test_all_ones(self):
        with pytest.warns(BoundaryWarning):
            g = fit_geometric([1, 1, 1, 1], 4)
        assert g.boundary == "lower" and g.params["q"] - GEOMETRIC_BOUNDS[0] < 1e-6
        with pytest.warns(BoundaryWarning):
            z = fit_zeta([1, 1, 1, 1], 4)
        assert z.boundary == "upper" and ZETA_BOUNDS[1] - z.params["gamma"] < 1e-6

    def test_all_at_d_max(self):
        with pytest.warns(BoundaryWarning):
            g = fit_geometric([4] * 10, 4)
        assert g.boundary == "upper"

    def test_uniform_sample(self):
        sample = list(range(1, 11)) * 50
        with pytest.warns(BoundaryWarning):
            g = fit_geometric(sample, 10)
        assert g.boundary == "upper" and g.params["q"] > 1 - 1e-5
        with pytest.warns(BoundaryWarning):
            z = fit_zeta(sample, 10)
        assert z.boundary == "lower" and z.params["gamma"] < 1e-5

    def test_interior_has_no_flag(self):
        rng = substream(1)
        with warnings.catch_warnings():
            warnings.simplefilter("error", BoundaryWarning)
            g = fit_geometric(sample_truncated_geometric(0.6, 10, 1000, rng), 10)
        assert g.boundary is None


class TestRecovery:
    def test_geometric(self):
        x = sample_truncated_geometric(0.5, 10, 100_000, substream(801))
        assert abs(fit_geometric(x, 10).params["q"] - 0.5) <= 0.01

    def test_zeta(self):
        x = sample_truncated_zeta(2.0, 50, 100_000, substream(802))
        assert abs(fit_zeta(x, 50).params["gamma"] - 2.0) <= 0.05

    def test_two_regime(self):
        t = TWO_REGIME_TRUTH
        pmf = two_regime_pmf(t["q1"], t["q2"], t["b"], t["weight"], t["d_max"])
        x = sample_from_pmf(pmf, 200_000, substream(803))
        r = fit_two_regime(x, t["d_max"])
        assert r.params["b"] == 5
        assert abs(r.params["q1"] - 0.4) <= 0.02
        assert abs(r.params["q2"] - 0.8) <= 0.02
        assert r.k == 3 and "exploratory" in r.metadata["model_status"]

    def test_forced_breakpoint(self):
        x = sample_truncated_geometric(0.7, 12, 500, substream(4))
        assert fit_two_regime(x, 12, b_range=[2]).params["b"] == 2

    def test_breakpoint_outside_range(self):
        with pytest.raises(ValueError):
            fit_two_regime([1, 2, 3], 4, b_range=[4])


class TestMaximum:
    @pytest.mark.parametrize("seed", range(4))
    def test_probes_never_beat_the_fit(self, seed):
        rng = substream(900, seed)
        x = sample_truncated_geometric(rng.uniform(0.2, 0.95), 15, 2000, rng)
        geo = TruncatedGeometric(15).fit(x)
        zeta = TruncatedZeta(15).fit(x)
        for q in rng.uniform(*GEOMETRIC_BOUNDS, size=64):
            probe = clone(geo)
            probe.q_, probe.d_max_ = q, 15
            assert probe.log_likelihood(x) <= geo.log_likelihood_ + 1e-9
        for g in rng.uniform(*ZETA_BOUNDS, size=64):
            probe = clone(zeta)
            probe.gamma_, probe.d_max_ = g, 15
            assert probe.log_likelihood(x) <= zeta.log_likelihood_ + 1e-9

    def test_likelihood_consistency(self):
        x = sample_truncated_zeta(1.5, 30, 3000, substream(5))
        for est in (TruncatedGeometric(30), TruncatedZeta(30), TwoRegimeGeometric(30)):
            est.fit(x)
            assert est.log_likelihood(x) == pytest.approx(est.log_likelihood_, rel=1e-12)
            assert est.log_likelihood_ <= 0
            assert est.score(x) == pytest.approx(est.log_likelihood_ / 3000)
            assert est.pmf().sum() == pytest.approx(1.0, abs=1e-12)

    def test_weights_equal_expansion(self):
        x = np.array([1, 1, 1, 2, 2, 5])
        a = fit_zeta(x, 6)
        b = fit_zeta([1, 2, 5], 6, sample_weight=[3, 2, 1])
        assert a.params["gamma"] == pytest.approx(b.params["gamma"], abs=1e-9)
        assert a.log_likelihood == pytest.approx(b.log_likelihood, abs=1e-9)


class TestTwoRegimeSelection:
    @pytest.mark.parametrize("seed", range(5))
    def test_nested_model_on_geometric_data(self, seed):
        x = sample_truncated_geometric(0.5, 10, 100_000, substream(810, seed))
        geo = fit_geometric(x, 10)
        two = fit_two_regime(x, 10)
        # the two-regime family contains the geometric, so it can only gain likelihood
        assert two.log_likelihood >= geo.log_likelihood - 1e-6
        # but the gain is noise-sized: never a decisive preference
        assert geo.aic - two.aic < 10


class TestCompare:
    def test_delta_aic(self):
        ranked = compare([result("geometric", -1000), result("zeta", -990)])
        assert ranked[0].result.family == "zeta"
        assert ranked[1].delta_aic == pytest.approx(20)
        assert ranked[0].delta_aic == 0

    def test_mismatch(self):
        with pytest.raises(ComparisonError):
            compare([result("geometric", -10, n=100), result("zeta", -9, n=101)])
        with pytest.raises(ComparisonError):
            compare([result("geometric", -10, d_max=9), result("zeta", -9)])
        with pytest.raises(ComparisonError):
            compare([result("zeta", -9)])

    def test_fixed_length_null_total_order(self):
        p = exact_null(12).p_d
        counts = [float(p[d]) * 10_000 for d in range(1, 12)]
        fits = [quiet(fit_counts, counts, fam) for fam in ("geometric", "zeta", "two_regime_geometric")]
        ranked = compare(fits)
        assert len(ranked) == 3
        aics = [r.result.aic for r in ranked]
        assert aics == sorted(aics)
        assert {r.result.family for r in ranked} == {"geometric", "zeta", "two_regime_geometric"}


class TestEstimatorApi:
    def test_params_and_clone(self):
        est = TwoRegimeGeometric(d_max=12, b_range=[3, 4])
        assert est.get_params() == {"d_max": 12, "b_range": [3, 4]}
        assert clone(est).get_params() == est.get_params()

    def test_deterministic(self):
        x = sample_truncated_geometric(0.7, 15, 5000, substream(6))
        assert TwoRegimeGeometric(15).fit(x).result() == TwoRegimeGeometric(15).fit(x).result()

    def test_d_max_defaults_to_sample_max(self):
        assert TruncatedGeometric().fit([1, 2, 7]).d_max_ == 7

    def test_result_dict(self):
        d = fit_geometric([1, 2, 2, 3], 5).as_dict()
        assert d["free_parameters"] == 1 and d["truncation"] == [1, 5]
        assert d["aic"] == pytest.approx(2 - 2 * d["log_likelihood"])
        assert math.isfinite(d["params"]["q"])
