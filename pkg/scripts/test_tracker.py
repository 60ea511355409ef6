"""
Tests for the recursive SOC tracker.
"""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chi2

from pysocerr.classes import BatteryTruth, BeliefParams, FilterState, MeasurementModel, NoiseSpec
from pysocerr.errors import predict_combined
from pysocerr.exceptions import DegenerateUpdateError, InvalidInputError
from pysocerr.model import decompose_series
from pysocerr.profiles import generate_profile
from pysocerr.tracker import (SINGLE_STEP, measurement_step, process_noise, process_step, synthetic_voltages,
                              track)

LINEAR_OCV = (3.0, 1.0)


class TestProcessStep:

    def test_noise_free_keeps_variance(self):
        state = process_step(FilterState(0.5, 0.01), 1.0, BeliefParams(1.5), NoiseSpec())
        assert state.p == 0.01
        assert state.s_hat == pytest.approx(0.5 + 1.0 / 5400)
        assert state.k == 1

    def test_current_noise_only(self):
        belief = BeliefParams(1.5, eta_c=0.9)
        state = process_step(FilterState(0.5, 0.0), 1.0, belief, NoiseSpec(sigma_i=0.01))
        assert state.p == pytest.approx((1.0 / 5400) ** 2 * 1e-4 * 0.9)
        idle = process_step(FilterState(0.5, 0.0), 0.0, belief, NoiseSpec(sigma_i=0.01))
        assert idle.p == 0.0

    def test_capacity_increment(self):
        belief = BeliefParams(1.5, delta=54.0)
        spec = NoiseSpec(sigma_batt=0.15)
        state = FilterState(0.6, 0.0, s_cc_c_running=0.10)
        after = process_step(state, 1.0, belief, spec)
        assert after.s_cc_c_running == pytest.approx(0.11)
        assert after.p == pytest.approx(0.1 ** 2 * (0.11 ** 2 - 0.10 ** 2))
        single = process_step(state, 1.0, belief, spec, rule=SINGLE_STEP)
        assert single.p == pytest.approx(0.1 ** 2 * 0.01 ** 2)

    def test_shrinking_soc_is_floored(self):
        belief = BeliefParams(1.5, delta=54.0)
        state = FilterState(0.6, 0.0, s_cc_c_running=0.10)
        assert process_noise(state, -1.0, -0.01, belief, NoiseSpec(sigma_batt=0.15)) == 0.0

    def test_q_override(self):
        state = process_step(FilterState(0.5, 0.0), 1.0, BeliefParams(1.5), NoiseSpec(sigma_i=1.0), q_override=1e-6)
        assert state.p == 1e-6

    def test_unknown_rule(self):
        with pytest.raises(InvalidInputError):
            process_noise(FilterState(0.5, 0.0), 1.0, 1e-4, BeliefParams(1.5), NoiseSpec(), rule='batch')

    def test_open_loop_variance_is_the_predicted_budget(self):
        belief = BeliefParams(1.5, eta_c=0.95, eta_d=0.9, delta=2.0)
        spec = NoiseSpec(sigma_i=0.01, kappa=0.88, sigma_l=0.4, sigma_batt=0.075, sigma_eta_c=0.02,
                         sigma_delta=0.001)
        currents = np.abs(np.sin(np.arange(500) / 20.0)) * 1.5
        state = FilterState(0.2, 0.0)
        variances = []
        for current in currents:
            state = process_step(state, current, belief, spec)
            variances.append(state.p)
        predicted = predict_combined(spec, belief, decompose_series(currents, belief)).variance
        np.testing.assert_allclose(variances, predicted, rtol=1e-9, atol=1e-20)


class TestMeasurementStep:

    def test_scalar_update(self):
        model = MeasurementModel(LINEAR_OCV, b=(), sigma_z=0.1)
        state = measurement_step(FilterState(0.5, 0.01), 3.6, np.zeros(0), model)
        assert state.s_hat == pytest.approx(0.55)
        assert state.p == pytest.approx(0.005)

    def test_voltage_drop_is_removed(self):
        model = MeasurementModel(LINEAR_OCV, b=(0.05,), sigma_z=0.1)
        state = measurement_step(FilterState(0.5, 0.01), 3.7, np.array([2.0]), model)
        assert state.s_hat == pytest.approx(0.55)

    def test_no_update(self):
        state = FilterState(0.5, 0.01)
        for sigma_z in (1e6, np.inf):
            assert measurement_step(state, 3.6, np.zeros(0), MeasurementModel(LINEAR_OCV, (), sigma_z)) is state
        certain = FilterState(0.5, 0.0)
        assert measurement_step(certain, 3.6, np.zeros(0), MeasurementModel(LINEAR_OCV, (), 0.1)) is certain

    @given(st.floats(min_value=0.0, max_value=1.0), st.floats(min_value=0.01, max_value=5.0),
           st.floats(min_value=1e-4, max_value=1e3), st.floats(min_value=0.0, max_value=1.0),
           st.floats(min_value=2.0, max_value=5.0))
    @settings(max_examples=300)
    def test_update_never_increases_variance(self, p, slope, sigma_z, s_hat, z_v):
        model = MeasurementModel((3.0, slope), b=(), sigma_z=sigma_z)
        prior = FilterState(s_hat, p)
        posterior = measurement_step(prior, z_v, np.zeros(0), model)
        assert 0.0 <= posterior.p <= prior.p

    def test_zero_innovation_variance(self):
        # 2.875 + 0.75 s - 1.5 s^2 + s^3 = 3 + (s - 0.5)^3 is flat at s = 0.5
        model = MeasurementModel((2.875, 0.75, -1.5, 1.0), b=(), sigma_z=0.0)
        with pytest.raises(DegenerateUpdateError):
            measurement_step(FilterState(0.5, 0.01), 3.0, np.zeros(0), model)


class TestMeasurementModel:

    @pytest.mark.parametrize('coeffs', [(3.0,), (3.0, -1.0), (3.0, 1.0, -2.0), (3.0, np.nan)])
    def test_rejects_non_monotone_ocv(self, coeffs):
        with pytest.raises(InvalidInputError):
            MeasurementModel(coeffs)

    def test_regressors(self):
        model = MeasurementModel(b=(0.05, 0.02))
        np.testing.assert_array_equal(model.regressors([1.0, 2.0, 3.0]), [[1.0, 0.0], [2.0, 1.0], [3.0, 2.0]])
        assert MeasurementModel(b=()).regressors([1.0, 2.0]).shape == (2, 0)

    def test_noise_free_voltages(self):
        model = MeasurementModel(LINEAR_OCV, b=(0.1,), sigma_z=np.inf)
        np.testing.assert_allclose(synthetic_voltages([0.5, 0.6], [1.0, -1.0], model, seed=0), [3.6, 3.5])
        assert not model.informative
        assert model.to_dict()['sigma_z'] == 'inf'


@pytest.fixture(scope='module')
def hour_profile():
    return generate_profile(60, (0.2, 1.8), (30.0, 90.0), seed=8, quantum=2.0)


TRUTH = BatteryTruth(1.5, delta_true=2.0)
BELIEF = BeliefParams.from_truth(TRUTH)


class TestTrack:

    def test_noise_free_run_follows_truth(self, hour_profile):
        result = track(hour_profile, TRUTH, BELIEF, NoiseSpec(seed=1), MeasurementModel(), s0=0.1)
        frame = result.frame
        np.testing.assert_allclose(frame['s_hat'], frame['s_true'], rtol=0, atol=1e-9)
        assert result.rmse == pytest.approx(0.0, abs=1e-9)
        assert list(frame.columns) == ['k', 't_s', 's_true', 's_cc_open_loop', 's_hat', 'p', 'z_v']

    def test_without_measurements_is_open_loop(self, hour_profile):
        spec = NoiseSpec(sigma_i=0.01, sigma_batt=0.075, seed=2)
        result = track(hour_profile, TRUTH, BELIEF, spec, MeasurementModel(sigma_z=np.inf), s0=0.1)
        frame = result.frame
        np.testing.assert_allclose(frame['s_hat'], frame['s_cc_open_loop'], rtol=0, atol=1e-12)
        assert result.rmse == pytest.approx(result.open_loop_rmse, rel=1e-9)
        assert np.all(np.diff(result.variance) >= 0)

    def test_reproducible(self, hour_profile):
        spec = NoiseSpec(sigma_i=0.01, sigma_batt=0.075, seed=3)
        first = track(hour_profile, TRUTH, BELIEF, spec, MeasurementModel(), s0=0.1, run_index=4)
        again = track(hour_profile, TRUTH, BELIEF, spec, MeasurementModel(), s0=0.1, run_index=4)
        np.testing.assert_array_equal(first.estimate, again.estimate)
        assert track(hour_profile, TRUTH, BELIEF, spec, MeasurementModel(), q_override=1e-8).rule == 'constant'

    def test_update_every(self, hour_profile):
        spec = NoiseSpec(sigma_batt=0.075, seed=5)
        result = track(hour_profile, TRUTH, BELIEF, spec, MeasurementModel(), s0=0.1, update_every=10)
        variance = result.variance
        # between updates the variance only grows
        assert np.all(np.diff(variance[:9]) >= 0)
        with pytest.raises(InvalidInputError):
            track(hour_profile, TRUTH, BELIEF, spec, MeasurementModel(), update_every=0)

    @pytest.mark.slow
    def test_open_loop_consistency(self):
        profile = generate_profile(60, (0.2, 1.8), (30.0, 90.0), seed=9, quantum=10.0)
        truth = BatteryTruth(1.5, delta_true=10.0)
        spec = NoiseSpec(sigma_i=0.05, sigma_delta=0.002, seed=6)
        model = MeasurementModel(sigma_z=np.inf)
        runs = 200
        nees = []
        for run_index in range(runs):
            result = track(profile, truth, BeliefParams.from_truth(truth), spec, model, s0=0.1, run_index=run_index)
            frame = result.frame
            nees.append((frame['s_hat'].iloc[-1] - frame['s_true'].iloc[-1]) ** 2 / frame['p'].iloc[-1])
        lower, upper = chi2.ppf([0.001, 0.999], runs) / runs
        assert lower <= np.mean(nees) <= upper

    @pytest.mark.slow
    def test_derived_noise_beats_constant_noise(self, hour_profile):
        spec = NoiseSpec(sigma_i=0.01, sigma_batt=0.075)
        model = MeasurementModel()
        rmse = {'derived': [], 1e-12: [], 1e-4: []}
        for seed in range(100):
            rmse['derived'].append(track(hour_profile, TRUTH, BELIEF, spec, model, seed=seed, s0=0.1).rmse)
            for q in (1e-12, 1e-4):
                rmse[q].append(track(hour_profile, TRUTH, BELIEF, spec, model, seed=seed, s0=0.1,
                                     q_override=q).rmse)
        median = {key: np.median(values) for key, values in rmse.items()}
        assert median['derived'] <= median[1e-12]
        assert median['derived'] <= median[1e-4]
