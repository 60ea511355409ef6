"""
Closed-form SOC-error predictors for the five error sources, their naive combination, and the injectors that corrupt
a clean Coulomb-counting simulation with one source or all of them.

Time-cumulative sources (current noise, integration error) grow with the number of samples; SOC-proportional sources
(capacity, efficiency, timing) scale with the accumulated SOC. All predictors work on SOC fractions and broadcast over
numpy arrays of sample counts or accumulated SOC.
"""
import logging

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from scipy.stats import norm

from .classes.Battery import BatteryTruth, BeliefParams
from .classes.NoiseSpec import NoiseSpec, BudgetEntry, ErrorBudget, Source
from .classes.Realization import Realization
from .classes.SegmentProfile import SegmentProfile
from .classes.SocTrace import CcDecomposition
from .exceptions import ConfigurationError, InvalidInputError
from .helpers import (SECONDS_PER_HOUR, STREAM_CAPACITY, STREAM_CURRENT, STREAM_EFFICIENCY, STREAM_INTEGRATION,
                      STREAM_TIMING, check_finite, check_nonnegative, check_positive, rng_stream)
from .model import cc_trace, decompose_series
from .profiles import sample, shuffle_amplitudes, true_soc_trace

logger = logging.getLogger(__name__)

GAUSS_HERMITE_ORDER = 40


def _as_output(value):
    return float(value) if np.ndim(value) == 0 else value


def effective_count(eta_c, eta_d, n_c, n_d, efficiency_squared=False):
    """
    Efficiency-weighted sample count eta_c * n_c + eta_d * n_d, or with squared efficiencies.
    """
    power = 2 if efficiency_squared else 1
    n_c = check_nonnegative(n_c, 'n_c')
    n_d = check_nonnegative(n_d, 'n_d')
    return check_positive(eta_c, 'eta_c') ** power * n_c + check_positive(eta_d, 'eta_d') ** power * n_d


def predict_sigma_current(delta, sigma_i, c_batt, eta_c, eta_d, n_c, n_d, efficiency_squared=False):
    """
    SOC-error s.d. caused by zero-mean white noise on the current samples.

    :param delta: [float] Sample period in seconds.
    :param sigma_i: [float] Current-noise s.d. in amperes.
    :param c_batt: [float] Capacity in ampere-hours.
    :param eta_c: [float] Charging efficiency.
    :param eta_d: [float] Discharging efficiency.
    :param n_c: [int or ndarray] Number of charging samples.
    :param n_d: [int or ndarray] Number of discharging samples.
    :param efficiency_squared: [bool] Weight the counts by squared efficiencies.
    :return: [float or ndarray] SOC fraction; multiply by 100 for percent.
    """
    delta = check_positive(delta, 'delta')
    sigma_i = check_nonnegative(sigma_i, 'sigma_i')
    c_batt = check_positive(c_batt, 'c_batt')
    count = effective_count(eta_c, eta_d, n_c, n_d, efficiency_squared)
    return _as_output(delta * (sigma_i / c_batt) / SECONDS_PER_HOUR * np.sqrt(count))


def predict_sigma_integration(delta, kappa, sigma_l, c_batt, eta_c, eta_d, n_c, n_d, efficiency_squared=False):
    """
    SOC-error s.d. caused by rectangular integration of a load with s.d. `sigma_l`, scaled by the empirical
    integration constant `kappa`.
    """
    kappa = check_nonnegative(kappa, 'kappa')
    sigma_l = check_nonnegative(sigma_l, 'sigma_l')
    return _as_output(kappa * predict_sigma_current(delta, sigma_l, c_batt, eta_c, eta_d, n_c, n_d,
                                                    efficiency_squared))


def predict_sigma_capacity(rho_c, s_cc):
    """
    SOC-error s.d. caused by a capacity known up to the relative s.d. `rho_c`: rho_c * |s_cc|.
    """
    rho_c = check_nonnegative(rho_c, 'rho_c')
    return _as_output(rho_c * np.abs(check_finite(s_cc, 's_cc')))


def predict_sigma_efficiency(sigma_eta_c, sigma_eta_d, s_cc_c, s_cc_d):
    """
    SOC-error s.d. caused by uncertain charging and discharging efficiency coefficients.
    """
    sigma_eta_c = check_nonnegative(sigma_eta_c, 'sigma_eta_c')
    sigma_eta_d = check_nonnegative(sigma_eta_d, 'sigma_eta_d')
    s_cc_c = check_finite(s_cc_c, 's_cc_c')
    s_cc_d = check_finite(s_cc_d, 's_cc_d')
    return _as_output(np.sqrt(np.square(sigma_eta_c * s_cc_c) + np.square(sigma_eta_d * s_cc_d)))


def predict_sigma_timing(s_cc, sigma_delta=0.0, rho_delta_fixed=None):
    """
    SOC error caused by a sampling clock that runs off by the coefficient rho_delta.

    A random coefficient with s.d. `sigma_delta` gives the s.d. sigma_delta * |s_cc|. A known, fixed coefficient gives
    the deterministic bias rho_delta_fixed * s_cc instead, which keeps its sign.

    :return: [float or ndarray] The s.d., or the signed bias in the fixed mode.
    """
    s_cc = check_finite(s_cc, 's_cc')
    sigma_delta = check_nonnegative(sigma_delta or 0.0, 'sigma_delta')
    if rho_delta_fixed is not None:
        if sigma_delta > 0:
            raise ConfigurationError("Specify either `sigma_delta` or `rho_delta_fixed`, not both")
        return _as_output(check_finite(rho_delta_fixed, 'rho_delta_fixed') * s_cc)
    return _as_output(sigma_delta * np.abs(s_cc))


def _decomposition_fields(decomp):
    if isinstance(decomp, CcDecomposition):
        return decomp.s_cc, decomp.s_cc_c, decomp.s_cc_d, decomp.n_c, decomp.n_d
    try:
        return tuple(np.asarray(decomp[name], dtype=float) for name in ('s_cc', 's_cc_c', 's_cc_d', 'n_c', 'n_d'))
    except (KeyError, TypeError, IndexError):
        raise TypeError("`decomp` must be a CcDecomposition or a frame from `decompose_series`")


def predict_combined(spec, belief, decomp, c_ref=None):
    """
    Naive combination of all five sources: the variances add as if the sources were independent.

    Fields of `spec` that were never set count as zero. The capacity coefficient is rho_C = sigma_batt / c_ref, with
    `c_ref` defaulting to the believed capacity.

    :param spec: [NoiseSpec]
    :param belief: [BeliefParams] Sample period, capacity and efficiencies the time-cumulative terms use.
    :param decomp: [CcDecomposition or pandas.DataFrame] A single decomposition, or the series from
        `decompose_series` for a prediction at every sample.
    :param c_ref: [float] Capacity the capacity coefficient is relative to.
    :return: [BudgetEntry] Per-source s.d., `combined` and the deterministic `timing_bias`.
    """
    if not isinstance(spec, NoiseSpec):
        raise TypeError(f"Expected `NoiseSpec`, got {type(spec).__name__}")
    if not isinstance(belief, BeliefParams):
        raise TypeError(f"Expected `BeliefParams`, got {type(belief).__name__}")
    s_cc, s_cc_c, s_cc_d, n_c, n_d = _decomposition_fields(decomp)
    c_ref = belief.c_batt if c_ref is None else check_positive(c_ref, 'c_ref')
    args = (belief.c_batt, belief.eta_c, belief.eta_d, n_c, n_d, spec.efficiency_squared)
    sigma_s_i = predict_sigma_current(belief.delta, spec.value('sigma_i'), *args)
    sigma_s_int = predict_sigma_integration(belief.delta, spec.value('kappa'), spec.value('sigma_l'), *args)
    sigma_s_c = predict_sigma_capacity(spec.value('sigma_batt') / c_ref, s_cc)
    sigma_s_eta = predict_sigma_efficiency(spec.value('sigma_eta_c'), spec.value('sigma_eta_d'), s_cc_c, s_cc_d)
    if spec.rho_delta_fixed is None:
        sigma_s_delta = predict_sigma_timing(s_cc, spec.value('sigma_delta'))
        timing_bias = np.zeros_like(np.asarray(s_cc, dtype=float))
    else:
        sigma_s_delta = np.zeros_like(np.asarray(s_cc, dtype=float))
        timing_bias = predict_sigma_timing(s_cc, rho_delta_fixed=spec.rho_delta_fixed)
    return BudgetEntry(sigma_s_i, sigma_s_int, sigma_s_c, sigma_s_eta, _as_output(sigma_s_delta),
                       _as_output(timing_bias))


def error_budget(spec, belief, currents, c_ref=None):
    """
    Predicted per-source and combined s.d. after every sample of `currents`.

    :param spec: [NoiseSpec]
    :param belief: [BeliefParams]
    :param currents: [array-like] Current samples in amperes.
    :param c_ref: [float] Capacity the capacity coefficient is relative to.
    :return: [ErrorBudget]
    """
    entry = predict_combined(spec, belief, decompose_series(currents, belief), c_ref)
    return ErrorBudget(entry, belief.delta)


def rho_delta_from_drift(drift_seconds, period_seconds):
    """
    Timing coefficient of a clock that drifts by `drift_seconds` over `period_seconds`; three minutes a month give
    180 / 2592000 = 6.9444e-5.
    """
    return check_finite(drift_seconds, 'drift_seconds') / check_positive(period_seconds, 'period_seconds')


def confidence_bands(soc, sigma, multiples=(1, 2, 3)):
    """
    Symmetric Gaussian confidence bands around an SOC estimate.

    :param soc: [float] The SOC estimate (fraction).
    :param sigma: [float] The SOC-error s.d. (fraction).
    :param multiples: [iterable] Band half-widths in units of `sigma`.
    :return: [list] (lower, upper, coverage) per multiple; coverage is the normal probability mass of the band.
    """
    soc = check_finite(soc, 'soc')
    sigma = check_nonnegative(sigma, 'sigma')
    bands = []
    for multiple in multiples:
        multiple = check_positive(multiple, 'multiple')
        coverage = float(norm.cdf(multiple) - norm.cdf(-multiple))
        bands.append((soc - multiple * sigma, soc + multiple * sigma, coverage))
    return bands


def oversampling_sigma(rho, delta, horizon_s, kappa=1.0):
    """
    Time-cumulative SOC-error s.d. at a fixed horizon T = n * delta: kappa * rho * sqrt(delta * T) / 3600.

    `rho` is rho_i or rho_I in 1/hour; halving `delta` divides the result by sqrt(2).
    """
    rho = check_nonnegative(rho, 'rho')
    delta = check_positive(delta, 'delta')
    horizon_s = check_nonnegative(horizon_s, 'horizon_s')
    return _as_output(check_nonnegative(kappa, 'kappa') * rho * np.sqrt(delta * horizon_s) / SECONDS_PER_HOUR)


def reinit_interval(target_sd, delta, rho, kappa=1.0, eta=1.0):
    """
    Time after which a time-cumulative error reaches `target_sd`, i.e. how often the SOC has to be reinitialized.

    :param target_sd: [float] Largest acceptable SOC-error s.d. (fraction).
    :param delta: [float] Sample period in seconds.
    :param rho: [float] rho_i or rho_I in 1/hour.
    :param kappa: [float] Integration constant; 1 for current noise.
    :param eta: [float] Efficiency weighting the sample count.
    :return: [float] Seconds; `numpy.inf` when the source is switched off.
    """
    target_sd = check_nonnegative(target_sd, 'target_sd')
    delta = check_positive(delta, 'delta')
    step_sd = check_nonnegative(kappa, 'kappa') * delta * check_nonnegative(rho, 'rho') / SECONDS_PER_HOUR
    if step_sd == 0:
        return np.inf
    samples = (target_sd / step_sd) ** 2 / check_positive(eta, 'eta')
    return float(samples * delta)


def exact_capacity_sd_factor(rho_c, order=GAUSS_HERMITE_ORDER):
    """
    Root-mean-square of C_true / C_batt - 1 for C_batt ~ N(C_true, (rho_c * C_true)^2).

    This is the exact counterpart of the first-order factor rho_c: the SOC error of a mis-sized capacity is
    s_cc * (C_true / C_batt - 1). The expectation is taken by Gauss-Hermite quadrature over positive capacities only.

    :param rho_c: [float] Relative capacity s.d.
    :param order: [int] Number of quadrature nodes.
    :return: [float]
    """
    rho_c = check_nonnegative(rho_c, 'rho_c')
    if rho_c == 0:
        return 0.0
    nodes, weights = hermegauss(order)
    ratio = 1.0 + rho_c * nodes
    keep = ratio > 0
    weights = weights[keep] / np.sum(weights[keep])
    return float(np.sqrt(np.sum(weights * np.square(1.0 / ratio[keep] - 1.0))))


def realize(source, profile, truth, belief, spec, run_index=0):
    """
    Draw one Monte-Carlo realization of an error source.

    Exactly the requested mechanism is perturbed (all of them for Source.COMBINED):
        - current: white Gaussian noise with s.d. sigma_i is added to every sample;
        - integration: the run's profile is the template with shuffled amplitudes, sampled by rectangles while the
          truth stays geometric; no synthetic noise is added;
        - capacity: the believed capacity is drawn once per run from N(c_true, sigma_batt^2);
        - efficiency: the believed efficiencies are eta_true * (1 + rho), rho ~ N(0, sigma_eta^2), drawn once per run;
        - timing: the believed sample period is delta_true * (1 + rho_delta) with a fixed or drawn rho_delta.
    Every mechanism draws from its own counter-based stream keyed by (spec.seed, run_index), so a run is reproducible
    on its own.

    :param source: [Source or string]
    :param profile: [SegmentProfile] The template true current.
    :param truth: [BatteryTruth]
    :param belief: [BeliefParams] The unperturbed belief; fields no mechanism touches are taken from here.
    :param spec: [NoiseSpec]
    :param run_index: [int]
    :return: [Realization]
    """
    source = Source.parse(source)
    if not isinstance(profile, SegmentProfile):
        raise TypeError(f"Expected `SegmentProfile`, got {type(profile).__name__}")
    if not isinstance(truth, BatteryTruth):
        raise TypeError(f"Expected `BatteryTruth`, got {type(truth).__name__}")
    if not isinstance(belief, BeliefParams):
        raise TypeError(f"Expected `BeliefParams`, got {type(belief).__name__}")
    if source is not Source.COMBINED:
        spec.require(source)
    combined = source is Source.COMBINED
    seed = spec.seed
    draws = {}
    changes = {}

    run_profile = profile
    if source is Source.INTEGRATION or (combined and spec.kappa is not None):
        run_profile = shuffle_amplitudes(profile, rng_stream(seed, run_index, STREAM_INTEGRATION))

    if source is Source.CAPACITY or (combined and spec.sigma_batt is not None):
        z = rng_stream(seed, run_index, STREAM_CAPACITY).standard_normal()
        c_batt = truth.c_true + spec.value('sigma_batt') * z
        if c_batt <= 0:
            raise InvalidInputError(f"Run {run_index} drew a non-positive capacity {c_batt} Ah; sigma_batt is too "
                                    f"large for c_true = {truth.c_true} Ah")
        changes['c_batt'] = draws['c_batt'] = float(c_batt)

    if source is Source.EFFICIENCY or (combined and (spec.sigma_eta_c is not None or spec.sigma_eta_d is not None)):
        z_c, z_d = rng_stream(seed, run_index, STREAM_EFFICIENCY).standard_normal(2)
        draws['rho_eta_c'] = float(spec.value('sigma_eta_c') * z_c)
        draws['rho_eta_d'] = float(spec.value('sigma_eta_d') * z_d)
        changes['eta_c'] = truth.eta_c_true * (1.0 + draws['rho_eta_c'])
        changes['eta_d'] = truth.eta_d_true * (1.0 + draws['rho_eta_d'])

    if source is Source.TIMING or (combined and (spec.sigma_delta is not None or spec.rho_delta_fixed is not None)):
        if spec.rho_delta_fixed is not None:
            rho_delta = spec.rho_delta_fixed
        else:
            rho_delta = spec.value('sigma_delta') * rng_stream(seed, run_index, STREAM_TIMING).standard_normal()
        draws['rho_delta'] = float(rho_delta)
        changes['delta'] = truth.delta_true * (1.0 + rho_delta)

    run_belief = belief.replace(**changes) if changes else belief
    clean = sample(run_profile, truth.delta_true)
    samples = clean.samples
    if source is Source.CURRENT or (combined and spec.sigma_i is not None):
        noise = rng_stream(seed, run_index, STREAM_CURRENT).normal(0.0, 1.0, size=len(clean))
        samples = samples + spec.value('sigma_i') * noise
    measured = clean.with_samples(samples)
    return Realization(source, run_index, run_profile, truth, run_belief, clean, measured, draws)


def true_trace(realization, s0=0.0):
    """The geometric true SOC of a realization's profile at its true sampling instants."""
    return true_soc_trace(realization.profile, realization.truth, s0, realization.truth.delta_true)


def inject(source, profile, truth, belief, spec, run_index=0, s0=0.0):
    """
    Coulomb-count a realization of `source`: the corrupted SOC trace one Monte-Carlo run produces.

    :return: [SocTrace] Aligned sample by sample with `true_trace` of the same realization.
    """
    realization = realize(source, profile, truth, belief, spec, run_index)
    return cc_trace(realization.measured.samples, s0, realization.belief)
