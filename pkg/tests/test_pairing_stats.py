"""Analytic pairing statistics against exact and enumerative oracles."""
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adaptive_mdiqkd import (
    PairingStatistics,
    ParameterError,
    arrival_dist,
    asymptotic_rate,
    binomial_pmf,
    binomial_pmf_vector,
    mean_sifted_pairs,
    min_pair_dist,
    pairing_deficit,
    pairing_deficit_exact,
    pairing_deficit_normal,
    sifted_pair_dist,
)
from adaptive_mdiqkd.montecarlo import estimate_sifted_dist

from oracles import exact_arrival, mean_min_by_enumeration, min_dist_by_enumeration, min_dist_exact

# Arbitrary-precision log-gamma evaluation of C(1000,500) 2^-1000.
PMF_500_OF_1000_HALF = 0.025225018178360802

P_GRID = [0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95]


class TestBinomialPmf:
    def test_certain_zero_successes(self):
        assert binomial_pmf(0, 5, 0.0) == 1.0
        assert binomial_pmf(3, 5, 0.0) == 0.0

    def test_small_product_form(self):
        assert binomial_pmf(1, 2, 0.5) == pytest.approx(0.5, rel=1e-15)

    def test_large_m_matches_high_precision_reference(self):
        assert binomial_pmf(500, 1000, 0.5) == pytest.approx(PMF_500_OF_1000_HALF, rel=1e-9)

    @pytest.mark.parametrize("m", [3, 17, 64, 65, 200, 500])
    def test_matches_exact_fraction_oracle(self, m):
        for num in [1, 3, 10, 19]:
            p = Fraction(num, 20)
            exact = exact_arrival(m, p)
            got = binomial_pmf_vector(m, float(p))
            for k in range(m + 1):
                ref = float(exact[k])
                if ref > 1e-290:
                    assert got[k] == pytest.approx(ref, rel=1e-11)

    def test_scalar_and_vector_agree(self):
        for m in (10, 64, 65, 300, 1500):
            vec = binomial_pmf_vector(m, 0.3)
            for k in (0, 1, m // 2, m):
                assert binomial_pmf(k, m, 0.3) == pytest.approx(vec[k], rel=1e-12, abs=1e-300)

    def test_domain_errors(self):
        with pytest.raises(ParameterError):
            binomial_pmf(3, 2, 0.5)
        with pytest.raises(ParameterError):
            binomial_pmf(1, 2, 1.5)
        with pytest.raises(ParameterError):
            binomial_pmf(-1, 2, 0.5)

    @given(st.integers(1, 300), st.floats(0.0, 1.0))
    @settings(max_examples=60, deadline=None)
    def test_values_are_probabilities(self, m, p):
        vec = binomial_pmf_vector(m, p)
        assert float(vec.min()) >= 0.0
        assert float(vec.max()) <= 1.0 + 1e-12


class TestArrivalDist:
    def test_symmetric_two_pulse(self):
        assert arrival_dist(2, 0.5) == pytest.approx([0.25, 0.5, 0.25], abs=1e-15)

    def test_no_heralds(self):
        assert arrival_dist(3, 0.0).tolist() == [1.0, 0.0, 0.0, 0.0]

    def test_matches_direct_enumeration(self):
        exact = exact_arrival(30, Fraction(1, 10))
        got = arrival_dist(30, 0.1)
        for k in range(31):
            assert got[k] == pytest.approx(float(exact[k]), abs=1e-12)

    @pytest.mark.parametrize("m", [1, 2, 64, 65, 500, 2000])
    @pytest.mark.parametrize("p", [0.0, 0.01, 0.1, 0.5, 0.9, 1.0])
    def test_normalization(self, m, p):
        assert math.fsum(arrival_dist(m, p).tolist()) == pytest.approx(1.0, abs=1e-10)


class TestMinPairDist:
    def test_frozen_two_pulse(self):
        # brute force over all outcomes of two independent Binomial(2, 0.5) draws
        assert min_pair_dist(2, 0.5) == pytest.approx([0.4375, 0.5, 0.0625], abs=1e-15)

    @pytest.mark.parametrize("p", P_GRID)
    def test_single_pulse_is_min_of_bernoullis(self, p):
        assert min_pair_dist(1, p) == pytest.approx([1 - p * p, p * p], abs=1e-15)

    def test_matches_joint_enumeration_frozen_point(self):
        ref = min_dist_by_enumeration(10, Fraction(3, 10))
        assert min_pair_dist(10, 0.3) == pytest.approx(ref, abs=1e-12)

    @pytest.mark.parametrize("m", [1, 2, 3, 5, 8, 12, 20, 33, 50])
    def test_matches_joint_enumeration_grid(self, m):
        for num in range(1, 10):
            p = Fraction(num, 10)
            ref = min_dist_by_enumeration(m, p)
            got = min_pair_dist(m, float(p))
            assert got == pytest.approx(ref, abs=1e-12)

    def test_matches_exact_rational_enumeration(self):
        for m, num in [(4, 3), (9, 7), (12, 1)]:
            ref = [float(x) for x in min_dist_exact(m, Fraction(num, 10))]
            assert min_pair_dist(m, num / 10) == pytest.approx(ref, abs=1e-13)

    @pytest.mark.parametrize("m", [1, 2, 64, 65, 500, 2000])
    @pytest.mark.parametrize("p", [0.0, 0.01, 0.1, 0.5, 0.9, 1.0])
    def test_normalization(self, m, p):
        f = min_pair_dist(m, p)
        assert float(f.min()) >= 0.0
        assert math.fsum(f.tolist()) == pytest.approx(1.0, abs=1e-10)

    @given(st.integers(1, 80), st.floats(0.0, 1.0))
    @settings(max_examples=60, deadline=None)
    def test_is_a_distribution(self, m, p):
        f = min_pair_dist(m, p)
        assert float(f.min()) >= 0.0
        assert math.fsum(f.tolist()) == pytest.approx(1.0, abs=1e-10)


class TestSiftedPairDist:
    @pytest.mark.parametrize("p", [0.2, 0.5, 0.9])
    @pytest.mark.parametrize("q", [0.1, 0.5, 1.0])
    def test_single_pulse_closed_form(self, p, q):
        dist = sifted_pair_dist(1, p, q)
        assert dist[1] == pytest.approx(q * p * p, rel=1e-13)

    @pytest.mark.parametrize("m,p", [(5, 0.4), (30, 0.1), (64, 0.5), (65, 0.5)])
    def test_perfect_pairing_equals_min_dist(self, m, p):
        assert np.array_equal(sifted_pair_dist(m, p, 1.0), min_pair_dist(m, p))

    @pytest.mark.parametrize("m", [1, 2, 64, 65, 500, 2000])
    @pytest.mark.parametrize("p", [0.0, 0.01, 0.1, 0.5, 0.9, 1.0])
    def test_normalization(self, m, p):
        dist = sifted_pair_dist(m, p, 0.43)
        assert math.fsum(dist.tolist()) == pytest.approx(1.0, abs=1e-10)

    def test_matches_monte_carlo_frequencies(self):
        m, p, q = 5, 0.4, 0.5
        analytic = sifted_pair_dist(m, p, q)
        empirical = estimate_sifted_dist(m, p, q, trials=10**6, seed=7)
        freq = empirical.frequencies
        for n in range(m + 1):
            sigma = math.sqrt(analytic[n] * (1 - analytic[n]) / empirical.trials)
            assert abs(freq[n] - analytic[n]) <= 3 * sigma + 1e-12


class TestPairingDeficit:
    @pytest.mark.parametrize("p", P_GRID)
    def test_single_pulse_closed_form(self, p):
        assert pairing_deficit_exact(1, p) == pytest.approx(p * (1 - p), rel=1e-14)

    def test_two_pulse_frozen(self):
        # 0.25 * (B(0|1)^2 + B(1|1)^2 + B(1|1) B(0|1)) at p = 1/2
        assert pairing_deficit_exact(2, 0.5) == pytest.approx(0.1875, rel=1e-14)

    def test_vanishes_with_multiplexing(self):
        for p in [0.1, 0.3, 0.5, 0.7, 0.9]:
            assert pairing_deficit_exact(1000, p) < pairing_deficit_exact(10, p)

    @given(st.integers(1, 400), st.floats(0.0, 1.0))
    @settings(max_examples=60, deadline=None)
    def test_bounds(self, m, p):
        g = pairing_deficit_exact(m, p)
        assert 0.0 <= g <= p + 1e-15

    def test_normal_approximation_small_m(self):
        approx = pairing_deficit_normal(2, 0.5)
        assert approx == pytest.approx(0.19947114020071635, rel=1e-12)
        assert abs(approx - pairing_deficit_exact(2, 0.5)) < 0.015

    @pytest.mark.parametrize("p", [0.1, 0.5])
    def test_normal_approximation_converges(self, p):
        ratios = [
            pairing_deficit_normal(m, p) / pairing_deficit_exact(m, p)
            for m in (100, 1000, 10_000)
        ]
        assert abs(ratios[-1] - 1.0) < 0.02
        assert abs(ratios[-1] - 1.0) < abs(ratios[0] - 1.0)

    def test_normal_approximation_degenerate_edges(self):
        assert pairing_deficit_normal(7, 0.0) == 0.0
        assert pairing_deficit_normal(7, 1.0) == 0.0

    def test_flagged_beyond_exact_limit(self):
        exact = pairing_deficit(50, 0.3, exact_limit=100)
        assert not exact.approximate
        assert exact.value == pairing_deficit_exact(50, 0.3)
        approx = pairing_deficit(50, 0.3, exact_limit=10)
        assert approx.approximate
        assert approx.value == pairing_deficit_normal(50, 0.3)


class TestMeanSiftedPairs:
    @pytest.mark.parametrize("p,q", [(0.3, 0.5), (0.9, 0.9), (0.5, 1.0)])
    def test_single_pulse_closed_form(self, p, q):
        assert mean_sifted_pairs(1, p, q) == pytest.approx(q * p * p, rel=1e-13)

    def test_two_pulse_brute_force(self):
        assert mean_min_by_enumeration(2, Fraction(1, 2)) == pytest.approx(0.625, abs=1e-15)
        assert mean_sifted_pairs(2, 0.5, 1.0) == pytest.approx(0.625, abs=1e-12)

    def test_no_heralds(self):
        assert mean_sifted_pairs(100, 0.0, 0.7) == 0.0

    def test_perfect_devices_exact(self):
        for m in (1, 10, 321):
            assert mean_sifted_pairs(m, 1.0, 1.0) == float(m)

    @pytest.mark.parametrize("m", [1, 2, 5, 13, 40, 64, 65, 100, 200, 350, 500])
    def test_mean_identity_against_weighted_min_dist(self, m):
        # m p_bm (p - deficit) must equal p_bm * sum_l l P(min = l); this is
        # the module's core internal consistency check.
        for p in [0.05, 0.2, 0.5, 0.8, 0.95]:
            for p_bm in (1.0, 0.43):
                f = min_pair_dist(m, p)
                weighted = p_bm * math.fsum((np.arange(m + 1) * f).tolist())
                assert abs(mean_sifted_pairs(m, p, p_bm) - weighted) <= 1e-10

    def test_monotone_in_each_argument(self):
        base = mean_sifted_pairs(50, 0.3, 0.5)
        for m in (51, 60, 100):
            assert mean_sifted_pairs(m, 0.3, 0.5) >= base
        for p in (0.31, 0.5, 0.9):
            assert mean_sifted_pairs(50, p, 0.5) >= base
        for q in (0.51, 0.7, 1.0):
            assert mean_sifted_pairs(50, 0.3, q) >= base


class TestAsymptoticRate:
    def test_ideal_product(self):
        assert asymptotic_rate(1.0, 1.0, 1.0, 1.0) == 1.0

    def test_default_device_point(self):
        rate = asymptotic_rate(0.43186069734312906, 0.10303080346176418, 0.9, 0.43186069734312906)
        assert rate == pytest.approx(1.7294059921605271e-2, rel=1e-12)

    def test_mean_rate_converges_to_asymptotic(self):
        # relative gap equals deficit/p: ~1.69e-2 at m = 1e4 and first drops
        # below 1e-2 near m ~ 3e4 for p = 0.1
        p, p_bm = 0.1, 0.43
        gap = lambda m: abs(mean_sifted_pairs(m, p, p_bm) / m - asymptotic_rate(1.0, 1.0, p, p_bm)) / (p * p_bm)
        assert gap(10_000) < 0.02
        assert gap(30_000) < 0.01
        assert gap(30_000) < gap(10_000) < gap(1_000)

    def test_domain(self):
        with pytest.raises(ParameterError):
            asymptotic_rate(1.2, 0.5, 0.5, 0.5)


class TestPairingStatistics:
    def test_distributions_normalized(self):
        stats = PairingStatistics(m=40, p=0.25, p_bm=0.43)
        for dist in (stats.arrival_dist(), stats.min_pair_dist(), stats.sifted_pair_dist()):
            assert math.fsum(dist.tolist()) == pytest.approx(1.0, abs=1e-10)
        assert stats.mean_sifted_pairs() > 0.0

    def test_rejects_invalid_fields(self):
        with pytest.raises(ParameterError):
            PairingStatistics(m=0, p=0.5, p_bm=0.5)
        with pytest.raises(ParameterError):
            PairingStatistics(m=3, p=1.5, p_bm=0.5)
        with pytest.raises(ParameterError):
            PairingStatistics(m=3, p=0.5, p_bm=-0.1)
