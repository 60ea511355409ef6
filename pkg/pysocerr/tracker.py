"""
Recursive SOC tracker: the Coulomb-counting process model with a process-noise variance derived from the error
budget, corrected by terminal-voltage measurements through a first-order (extended Kalman) update.
"""
import logging

import numpy as np
import pandas as pd

from .classes.Battery import BeliefParams
from .classes.FilterState import FilterState, MeasurementModel, TrackResult
from .classes.NoiseSpec import NoiseSpec, Source
from .errors import realize, true_trace
from .exceptions import DegenerateUpdateError, InvalidInputError
from .helpers import SECONDS_PER_HOUR, STREAM_VOLTAGE, check_finite, check_nonnegative, rng_stream
from .model import cc_trace

logger = logging.getLogger(__name__)

INCREMENTAL = 'incremental'
SINGLE_STEP = 'single_step'
RULES = (INCREMENTAL, SINGLE_STEP)


def _soc_proportional_variance(spec, belief, s_cc_c, s_cc_d):
    rho_c = spec.value('sigma_batt') / belief.c_batt
    s_cc = s_cc_c + s_cc_d
    return ((rho_c ** 2 + spec.value('sigma_delta') ** 2) * s_cc ** 2 +
            spec.value('sigma_eta_c') ** 2 * s_cc_c ** 2 + spec.value('sigma_eta_d') ** 2 * s_cc_d ** 2)


def process_noise(state, z_i, increment, belief, spec, rule=INCREMENTAL):
    """
    Process-noise variance q(k) of one step.

    Time-cumulative sources contribute their single-sample variance. SOC-proportional sources contribute, under the
    'incremental' rule, the growth of their cumulative variance over the step, floored at zero; under the
    'single_step' rule, their variance evaluated on this step's SOC change alone.

    :param state: [FilterState] The state before the step.
    :param z_i: [float] Measured current.
    :param increment: [float] SOC change of the step.
    :param belief: [BeliefParams]
    :param spec: [NoiseSpec]
    :param rule: [string] 'incremental' or 'single_step'.
    :return: [float]
    """
    q = 0.0
    if z_i != 0:
        weight = belief.efficiency(z_i) ** (2 if spec.efficiency_squared else 1)
        scale = belief.delta / (SECONDS_PER_HOUR * belief.c_batt)
        q += scale ** 2 * (spec.value('sigma_i') ** 2 +
                           spec.value('kappa') ** 2 * spec.value('sigma_l') ** 2) * weight
    step_c = increment if z_i > 0 else 0.0
    step_d = increment if z_i < 0 else 0.0
    if rule == INCREMENTAL:
        before = _soc_proportional_variance(spec, belief, state.s_cc_c_running, state.s_cc_d_running)
        after = _soc_proportional_variance(spec, belief, state.s_cc_c_running + step_c,
                                           state.s_cc_d_running + step_d)
        q += max(after - before, 0.0)
    elif rule == SINGLE_STEP:
        q += _soc_proportional_variance(spec, belief, step_c, step_d)
    else:
        raise InvalidInputError(f"Unknown process-noise rule {rule!r}, valid rules are {RULES}")
    return q


def process_step(state, z_i, belief, spec, rule=INCREMENTAL, q_override=None):
    """
    Time update: Coulomb-count the measured current and grow the variance by the process noise.

    :param state: [FilterState]
    :param z_i: [float] Measured current in amperes.
    :param belief: [BeliefParams] The counter's parameters.
    :param spec: [NoiseSpec] Noise model sizing q(k).
    :param rule: [string] How SOC-proportional sources enter q(k), see `process_noise`.
    :param q_override: [float] Constant q used instead of the derived one.
    :return: [FilterState]
    """
    z_i = check_finite(z_i, 'z_i')
    increment = belief.efficiency(z_i) * belief.delta * z_i / (SECONDS_PER_HOUR * belief.c_batt)
    if q_override is None:
        q = process_noise(state, z_i, increment, belief, spec, rule)
    else:
        q = check_nonnegative(q_override, 'q_override')
    return FilterState(s_hat=state.s_hat + increment, p=state.p + q, k=state.k + 1,
                       s_cc_c_running=state.s_cc_c_running + (increment if z_i > 0 else 0.0),
                       s_cc_d_running=state.s_cc_d_running + (increment if z_i < 0 else 0.0))


def measurement_step(state, z_v, regressor, model):
    """
    Measurement update with the OCV model linearized at the prior mean.

    :param state: [FilterState]
    :param z_v: [float] Measured terminal voltage.
    :param regressor: [array-like] a(k), the current and its lagged values.
    :param model: [MeasurementModel]
    :return: [FilterState] Unchanged for an uninformative model or a zero prior variance.
    """
    if not model.informative or state.p == 0:
        return state
    z_v = check_finite(z_v, 'z_v')
    h = float(model.docv(state.s_hat))
    innovation_variance = h * h * state.p + model.sigma_z ** 2
    if innovation_variance == 0:
        logger.error("Zero innovation variance at step " + str(state.k))
        raise DegenerateUpdateError(f"Innovation variance is zero at step {state.k}")
    innovation = z_v - float(model.ocv(state.s_hat)) - model.voltage_drop(regressor)
    gain = state.p * h / innovation_variance
    return state.replace(s_hat=state.s_hat + gain * innovation, p=max(0.0, (1.0 - gain * h) * state.p))


def synthetic_voltages(s_true, currents, model, seed, run_index=0):
    """
    Terminal voltages V_ocv(s_true) + a(k)^T b plus Gaussian noise with s.d. sigma_z; noise-free when sigma_z is not
    finite.
    """
    voltages = model.ocv(np.asarray(s_true, dtype=float)) + model.regressors(currents) @ model.b
    if np.isfinite(model.sigma_z) and model.sigma_z > 0:
        noise = rng_stream(seed, run_index, STREAM_VOLTAGE).standard_normal(voltages.size)
        voltages = voltages + model.sigma_z * noise
    return voltages


def track(profile, truth, belief, spec, model, seed=None, s0=0.5, run_index=0, rule=INCREMENTAL, q_override=None,
          update_every=1, p0=0.0):
    """
    Closed-loop tracker run on a combined corruption of `profile`.

    The counter sees the corrupted currents and believed parameters of one `realize(Source.COMBINED, ...)` draw;
    voltages are synthesized from the true SOC and the true currents.

    :param profile: [SegmentProfile]
    :param truth: [BatteryTruth]
    :param belief: [BeliefParams] Unperturbed belief.
    :param spec: [NoiseSpec] Both the injected corruption and the filter's noise model.
    :param model: [MeasurementModel]
    :param seed: [int] Overrides `spec.seed`.
    :param s0: [float] Initial SOC, known exactly to the filter.
    :param run_index: [int]
    :param rule: [string] Process-noise rule.
    :param q_override: [float] Constant process noise replacing the derived q(k).
    :param update_every: [int] Apply a measurement update every this many samples.
    :param p0: [float] Initial variance.
    :return: [TrackResult]
    """
    if not isinstance(spec, NoiseSpec):
        raise TypeError(f"Expected `NoiseSpec`, got {type(spec).__name__}")
    if not isinstance(model, MeasurementModel):
        raise TypeError(f"Expected `MeasurementModel`, got {type(model).__name__}")
    if not isinstance(belief, BeliefParams):
        raise TypeError(f"Expected `BeliefParams`, got {type(belief).__name__}")
    if rule not in RULES:
        raise InvalidInputError(f"Unknown process-noise rule {rule!r}, valid rules are {RULES}")
    if int(update_every) != update_every or update_every < 1:
        raise InvalidInputError(f"`update_every` must be a positive integer, got {update_every!r}")
    if seed is not None:
        spec = spec.replace(seed=seed)

    realization = realize(Source.COMBINED, profile, truth, belief, spec, run_index)
    measured = realization.measured.samples
    s_true = true_trace(realization, s0).values
    open_loop = cc_trace(measured, s0, realization.belief).values
    z_v = synthetic_voltages(s_true, realization.clean.samples, model, spec.seed, run_index)
    regressors = model.regressors(measured)

    state = FilterState(s_hat=s0, p=p0)
    s_hat = np.empty(measured.size)
    p = np.empty(measured.size)
    for k in range(measured.size):
        state = process_step(state, measured[k], realization.belief, spec, rule, q_override)
        if (k + 1) % update_every == 0:
            state = measurement_step(state, z_v[k], regressors[k], model)
        s_hat[k] = state.s_hat
        p[k] = state.p

    steps = np.arange(1, measured.size + 1)
    frame = pd.DataFrame({'k': steps, 't_s': steps * truth.delta_true, 's_true': s_true,
                          's_cc_open_loop': open_loop, 's_hat': s_hat, 'p': p, 'z_v': z_v})
    result = TrackResult(frame, state, rule if q_override is None else 'constant', spec.seed, run_index)
    logger.info("Tracked " + str(measured.size) + " samples: RMSE " + str(result.rmse) + " (open loop " +
                str(result.open_loop_rmse) + ")")
    return result
