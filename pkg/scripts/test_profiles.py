"""
Tests for profile generation, the geometric Coulomb oracle, sampling and load statistics.
"""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pysocerr.classes import BatteryTruth, BeliefParams, SampledCurrent, SegmentProfile
from pysocerr.exceptions import InvalidInputError, InvalidSpecError
from pysocerr.helpers import rng_stream
from pysocerr.model import cc_trace
from pysocerr.profiles import (exact_coulombs, generate_profile, sample, sample_times, short_segment_kappa, stats,
                               true_soc_trace)

segments_strategy = st.lists(st.tuples(st.floats(min_value=0.01, max_value=100.0),
                                       st.floats(min_value=-5.0, max_value=5.0)), min_size=1, max_size=30)


class TestGenerateProfile:

    def test_bounds(self):
        profile = generate_profile(500, (-2.0, 3.0), (0.5, 4.0), seed=11)
        assert len(profile) == 500
        assert np.all((profile.amplitudes >= -2.0) & (profile.amplitudes <= 3.0))
        assert np.all((profile.durations >= 0.5) & (profile.durations <= 4.0))

    def test_deterministic(self):
        assert generate_profile(50, (0.0, 1.0), (1.0, 2.0), seed=4) == \
            generate_profile(50, (0.0, 1.0), (1.0, 2.0), seed=4)
        assert generate_profile(50, (0.0, 1.0), (1.0, 2.0), seed=4) != \
            generate_profile(50, (0.0, 1.0), (1.0, 2.0), seed=5)

    def test_quantum(self):
        profile = generate_profile(200, (-1.0, 1.0), (30.0, 90.0), seed=2, quantum=10.0)
        assert profile.is_aligned(10.0)
        assert set(np.round(profile.durations).astype(int)) <= set(range(30, 91, 10))

    @pytest.mark.parametrize('count, amplitudes, durations, quantum', [
        (0, (0.0, 1.0), (1.0, 2.0), None),
        (10, (1.0, 0.0), (1.0, 2.0), None),
        (10, (0.0, 1.0), (0.0, 2.0), None),
        (10, (0.0, 1.0), (3.0, 2.0), None),
        (10, (0.0, 1.0), (1.1, 1.9), 1.0),
    ])
    def test_invalid(self, count, amplitudes, durations, quantum):
        with pytest.raises(InvalidSpecError):
            generate_profile(count, amplitudes, durations, seed=0, quantum=quantum)


class TestExactCoulombs:

    def test_example(self):
        profile = SegmentProfile.from_segments([(10.0, 2.0), (10.0, -1.0)])
        assert exact_coulombs(profile, 15.0) == 15.0
        assert exact_coulombs(profile, 0.0) == 0.0
        assert exact_coulombs(profile, 20.0) == 10.0

    def test_out_of_range(self):
        profile = SegmentProfile.constant(1.0, 10.0)
        with pytest.raises(InvalidInputError):
            exact_coulombs(profile, 10.5)
        with pytest.raises(InvalidInputError):
            exact_coulombs(profile, -1.0)

    @given(segments_strategy, segments_strategy, st.floats(min_value=0.0, max_value=1.0))
    @settings(max_examples=200)
    def test_additive_over_concatenation(self, first, second, fraction):
        head = SegmentProfile.from_segments(first)
        tail = SegmentProfile.from_segments(second)
        joined = head.concat(tail)
        u = fraction * tail.total_duration
        expected = exact_coulombs(head, head.total_duration) + exact_coulombs(tail, u)
        assert exact_coulombs(joined, min(head.total_duration + u, joined.total_duration)) == \
            pytest.approx(expected, rel=1e-9, abs=1e-9)

    @given(st.lists(st.tuples(st.floats(min_value=0.01, max_value=100.0), st.floats(min_value=0.0, max_value=5.0)),
                    min_size=1, max_size=30), st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=2))
    @settings(max_examples=200)
    def test_monotone_for_charging_profiles(self, segments, fractions):
        profile = SegmentProfile.from_segments(segments)
        areas = [exact_coulombs(profile, f * profile.total_duration) for f in sorted(fractions)]
        assert np.all(np.diff(areas) >= -1e-12)


class TestShortSegmentKappa:

    def test_default_family(self):
        assert short_segment_kappa((0.05, 0.25), 1.0) == pytest.approx(0.9098, abs=1e-4)

    def test_relative_to_the_sample_period(self):
        assert short_segment_kappa((0.5, 2.5), 10.0) == pytest.approx(short_segment_kappa((0.05, 0.25), 1.0))
        # fixed length d: kappa^2 = 1 - d
        assert short_segment_kappa((0.19, 0.19), 1.0) == pytest.approx(0.9)

    def test_segments_longer_than_a_period(self):
        with pytest.raises(InvalidInputError):
            short_segment_kappa((0.5, 1.5), 1.0)


class TestTrueSocTrace:

    def test_example(self):
        profile = SegmentProfile.from_segments([(1800.0, 1.5), (1800.0, -1.5)])
        trace = true_soc_trace(profile, BatteryTruth(1.5, eta_d_true=0.9, delta_true=900.0), s0=0.2)
        np.testing.assert_allclose(trace.values, [0.45, 0.7, 0.475, 0.25], rtol=0, atol=1e-12)
        assert trace.s0 == 0.2

    def test_partial_last_period(self):
        profile = SegmentProfile.constant(1.0, 3599.5)
        trace = true_soc_trace(profile, BatteryTruth(1.0, delta_true=1.0))
        assert len(trace) == 3599

    def test_aligned_profile_matches_counter(self):
        truth = BatteryTruth(2.0, eta_c_true=0.95, eta_d_true=0.9, delta_true=2.0)
        for seed in range(100):
            profile = generate_profile(20, (-3.0, 3.0), (2.0, 40.0), seed=seed, quantum=2.0)
            counted = cc_trace(sample(profile, truth.delta_true).samples, 0.3, BeliefParams.from_truth(truth))
            geometric = true_soc_trace(profile, truth, 0.3)
            np.testing.assert_allclose(counted.values, geometric.values, rtol=0, atol=1e-9)


class TestSample:

    def test_right_endpoint(self):
        profile = SegmentProfile.from_segments([(2.0, 1.0), (3.0, -1.0)])
        np.testing.assert_array_equal(sample(profile, 1.0).samples, [1.0, 1.0, -1.0, -1.0, -1.0])

    def test_unaligned_boundary_is_a_rectangle_error(self):
        profile = SegmentProfile.from_segments([(1.5, 1.0), (1.5, 2.0)])
        sampled = sample(profile, 1.0)
        np.testing.assert_array_equal(sampled.samples, [1.0, 2.0, 2.0])
        assert np.sum(sampled.samples[:2]) - exact_coulombs(profile, 2.0) == pytest.approx(0.5)

    def test_clock_error(self):
        profile = SegmentProfile.constant(1.0, 100.0)
        assert len(sample(profile, 1.0, clock_error=0.0)) == 100
        times, effective = sample_times(profile, 1.0, clock_error=0.25)
        assert effective == pytest.approx(0.8)
        assert times.size == 125
        assert sample(profile, 1.0, clock_error=0.25).delta == 1.0
        with pytest.raises(InvalidInputError):
            sample(profile, 1.0, clock_error=-1.0)


def _rescaled(sd, size=5000, seed=0):
    values = rng_stream(seed).standard_normal(size)
    values = (values - values.mean()) / values.std(ddof=1)
    return SampledCurrent(1.0, sd * values)


class TestStats:

    def test_constant_current(self):
        load = stats(SampledCurrent(1.0, np.full(50, -0.8)), 1.5)
        assert load.sigma_l == pytest.approx(0.0, abs=1e-12)
        assert load.rho_int_coeff == pytest.approx(0.0, abs=1e-12)
        assert load.mean_current == pytest.approx(-0.8)

    @pytest.mark.parametrize('sigma_l, c_batt, rho_int', [(0.1673, 1.5, 0.1115), (8.6917, 250.0, 0.0348)])
    def test_published_loads(self, sigma_l, c_batt, rho_int):
        load = stats(_rescaled(sigma_l), c_batt, sigma_i=0.01)
        assert load.sigma_l == pytest.approx(sigma_l)
        assert load.rho_int_coeff == pytest.approx(rho_int, abs=1e-4)
        assert load.rho_i_coeff == pytest.approx(0.01 / c_batt)

    def test_difference_histogram(self):
        profile = generate_profile(100, (-2.0, 2.0), (10.0, 60.0), seed=3, quantum=1.0)
        sampled = sample(profile, 1.0)
        histogram = stats(sampled, 1.5).diff_histogram
        assert list(histogram.columns) == ['bin_left', 'bin_right', 'count']
        assert histogram['count'].sum() == len(sampled) - 1
        centre = histogram.iloc[len(histogram) // 2]
        assert centre['bin_left'] < 0 < centre['bin_right']
        assert centre['count'] >= len(sampled) - 100

    def test_needs_two_samples(self):
        with pytest.raises(InvalidInputError):
            stats(SampledCurrent(1.0, [1.0]), 1.5)
