"""
Tests for the discrete Coulomb counter and the charge/discharge decomposition.
"""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pysocerr.classes import BatteryTruth, BeliefParams, CcDecomposition, SocTrace
from pysocerr.exceptions import InvalidInputError
from pysocerr.model import cc_step, cc_trace, decompose, decompose_series

currents_strategy = st.lists(st.floats(min_value=-5.0, max_value=5.0, allow_nan=False, allow_infinity=False),
                             min_size=1, max_size=200)


class TestBatteryParams:

    def test_truth_invariants(self):
        with pytest.raises(InvalidInputError):
            BatteryTruth(c_true=0.0)
        with pytest.raises(InvalidInputError):
            BatteryTruth(c_true=1.5, eta_c_true=1.2)
        with pytest.raises(InvalidInputError):
            BatteryTruth(c_true=1.5, delta_true=-1.0)

    def test_belief_rejects_overunity_unless_allowed(self):
        with pytest.raises(ValueError):
            BeliefParams(c_batt=1.5, eta_d=1.01)
        belief = BeliefParams(c_batt=1.5).replace(eta_c=1.02)
        assert belief.eta_c == 1.02
        assert belief.c_batt == 1.5

    def test_from_truth(self):
        truth = BatteryTruth(2.0, 0.95, 0.9, 0.5)
        belief = BeliefParams.from_truth(truth)
        assert (belief.c_batt, belief.eta_c, belief.eta_d, belief.delta) == (2.0, 0.95, 0.9, 0.5)

    def test_efficiency_selection(self):
        belief = BeliefParams(1.0, eta_c=0.9, eta_d=0.8)
        assert belief.efficiency(1.0) == 0.9
        assert belief.efficiency(-1.0) == 0.8
        np.testing.assert_array_equal(belief.efficiencies([1.0, -1.0, 0.0]), [0.9, 0.8, 0.9])


class TestCcStep:

    def test_full_charge_in_one_step(self):
        assert cc_step(0.0, 1.5, BeliefParams(1.5, delta=3600.0)) == pytest.approx(1.0)

    def test_zero_current(self):
        assert cc_step(0.5, 0.0, BeliefParams(1.5)) == 0.5

    def test_discharge_with_efficiency(self):
        belief = BeliefParams(1.0, eta_d=0.9, delta=360.0)
        assert cc_step(0.2, -1.0, belief) == pytest.approx(0.11, abs=1e-15)

    def test_non_finite_input(self):
        with pytest.raises(InvalidInputError):
            cc_step(0.0, np.nan, BeliefParams(1.5))
        with pytest.raises(InvalidInputError):
            cc_step(np.inf, 1.0, BeliefParams(1.5))


class TestCcTrace:

    def test_constant_charge(self):
        trace = cc_trace(np.full(3600, 1.5), 0.0, BeliefParams(1.5))
        assert len(trace) == 3600
        assert trace.final == pytest.approx(1.0, abs=1e-11)

    def test_empty_trace(self):
        trace = cc_trace([], 0.3, BeliefParams(1.5))
        assert len(trace) == 0
        assert trace.final == 0.3

    def test_charge_then_discharge(self):
        currents = np.concatenate((np.ones(1800), -np.ones(1800)))
        trace = cc_trace(currents, 0.5, BeliefParams(1.0, eta_c=0.9, eta_d=1.0))
        assert trace.final == pytest.approx(0.45, abs=1e-11)

    def test_matches_repeated_steps(self):
        rng = np.random.default_rng(3)
        currents = rng.normal(0.0, 2.0, 500)
        belief = BeliefParams(2.0, eta_c=0.97, eta_d=0.93, delta=2.0)
        s = 0.4
        expected = []
        for i in currents:
            s = cc_step(s, i, belief)
            expected.append(s)
        np.testing.assert_allclose(cc_trace(currents, 0.4, belief).values, expected, rtol=0, atol=1e-12)

    def test_values_are_not_clamped(self):
        trace = cc_trace(np.full(7200, 1.5), 0.5, BeliefParams(1.5))
        assert trace.final == pytest.approx(2.5)
        assert SocTrace(0.0, [-0.2, 1.3], 1.0).values.min() < 0

    def test_long_trace_stays_accurate(self):
        # 10 uA over 200000 samples: every increment is tiny against the running SOC
        n = 200_000
        belief = BeliefParams(1.0)
        trace = cc_trace(np.full(n, 1e-5), 0.5, belief)
        exact = 0.5 + n * 1e-5 / 3600.0
        assert abs(trace.final - exact) < 1e-14


class TestDecompose:

    def test_all_positive(self):
        decomp = decompose(np.full(100, 2.0), BeliefParams(1.0))
        assert decomp.s_cc_d == 0.0
        assert decomp.n_d == 0
        assert decomp.n_c == 100

    def test_charge_then_discharge(self):
        currents = np.concatenate((np.ones(1800), -np.ones(1800)))
        decomp = decompose(currents, BeliefParams(1.0, eta_c=0.9, eta_d=1.0))
        assert decomp.s_cc_c == pytest.approx(0.45)
        assert decomp.s_cc_d == pytest.approx(-0.5)
        assert (decomp.n_c, decomp.n_d) == (1800, 1800)
        assert decomp.s_cc == decomp.s_cc_c + decomp.s_cc_d

    def test_zeros_counted_in_neither(self):
        decomp = decompose([1.0, 0.0, -1.0, 0.0, 2.0], BeliefParams(1.0))
        assert decomp.n_c + decomp.n_d == 3

    def test_series_final_row_matches(self):
        rng = np.random.default_rng(11)
        currents = rng.normal(0.0, 1.0, 1000)
        belief = BeliefParams(1.5, eta_c=0.95)
        series = decompose_series(currents, belief)
        decomp = decompose(currents, belief)
        last = series.iloc[-1]
        assert last['s_cc'] == pytest.approx(decomp.s_cc, abs=1e-12)
        assert last['n_c'] == decomp.n_c and last['n_d'] == decomp.n_d
        assert np.all(series['s_cc_c'].diff().dropna() >= 0)

    def test_decomposition_invariants(self):
        with pytest.raises(InvalidInputError):
            CcDecomposition(s_cc_c=-0.1, s_cc_d=0.0, n_c=1, n_d=0)
        with pytest.raises(InvalidInputError):
            CcDecomposition(s_cc_c=0.1, s_cc_d=0.1, n_c=1, n_d=1)


class TestCounterProperties:

    @given(currents_strategy, currents_strategy, st.floats(min_value=-1.0, max_value=1.0))
    @settings(max_examples=200, deadline=None)
    def test_linearity_over_concatenation(self, first, second, s0):
        belief = BeliefParams(1.5, eta_c=0.95, eta_d=0.9, delta=1.0)
        whole = cc_trace(first + second, s0, belief)
        part = cc_trace(first, s0, belief)
        composed = cc_trace(second, part.final, belief)
        assert whole.final == pytest.approx(composed.final, abs=1e-12)

    @given(currents_strategy)
    @settings(max_examples=200, deadline=None)
    def test_doubling_capacity_halves_soc_change(self, currents):
        small = cc_trace(currents, 0.2, BeliefParams(1.0))
        large = cc_trace(currents, 0.2, BeliefParams(2.0))
        assert (large.final - 0.2) == pytest.approx((small.final - 0.2) / 2, abs=1e-14)

    @given(currents_strategy)
    @settings(max_examples=200, deadline=None)
    def test_negating_profile_negates_soc_change(self, currents):
        belief = BeliefParams(1.5, eta_c=0.9, eta_d=0.9)
        forward = decompose(currents, belief)
        backward = decompose([-i for i in currents], belief)
        assert backward.s_cc == pytest.approx(-forward.s_cc, abs=1e-14)

    @given(currents_strategy, st.floats(min_value=0.0, max_value=1.0))
    @settings(max_examples=200, deadline=None)
    def test_decompose_matches_trace(self, currents, s0):
        belief = BeliefParams(1.5, eta_c=0.97, eta_d=0.92)
        assert decompose(currents, belief).s_cc == pytest.approx(cc_trace(currents, s0, belief).final - s0,
                                                                 abs=1e-12)
