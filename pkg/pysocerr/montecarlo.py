"""
Monte-Carlo validation of the closed-form predictors and the empirical fit of the integration constant kappa.
"""
import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import statsmodels.api as sm

from .classes.Battery import BeliefParams
from .classes.McResult import McResult
from .classes.NoiseSpec import NoiseSpec, Source
from .errors import exact_capacity_sd_factor, predict_combined, realize, true_trace
from .exceptions import DegenerateProfileError, InvalidInputError, ToleranceError
from .helpers import check_finite, check_positive, neumaier_add
from .model import cc_trace, decompose_series
from .profiles import sample, stats

logger = logging.getLogger(__name__)

DEFAULT_MC_TOLERANCE = 0.07
CAPACITY_MC_TOLERANCE = 0.12
INTEGRATION_MC_TOLERANCE = 0.10
DEFAULT_CHUNK_SIZE = 50
# theoretical s.d. at or below this is not compared
BURN_IN_FLOOR = 10 * np.finfo(float).eps
# sigma_L below this fraction of the largest |current| counts as a constant load
CONSTANT_LOAD_RTOL = 1e-12


def default_tolerance(source):
    source = Source.parse(source)
    return {Source.CAPACITY: CAPACITY_MC_TOLERANCE,
            Source.INTEGRATION: INTEGRATION_MC_TOLERANCE}.get(source, DEFAULT_MC_TOLERANCE)


def _prepare(truth, belief, delta):
    if delta is None:
        return truth, belief
    delta = check_positive(delta, 'delta')
    return truth.with_delta(delta), belief.replace(delta=delta)


def _run_chunk(run_indices, source, profile, truth, belief, spec, s0):
    """
    Squared and signed SOC errors of a block of runs, accumulated per sample with compensated summation.
    """
    sq_total = sq_comp = err_total = err_comp = None
    draws = []
    for run_index in run_indices:
        realization = realize(source, profile, truth, belief, spec, run_index)
        error = cc_trace(realization.measured.samples, s0, realization.belief).values - \
            true_trace(realization, s0).values
        if sq_total is None:
            sq_total, sq_comp = np.zeros_like(error), np.zeros_like(error)
            err_total, err_comp = np.zeros_like(error), np.zeros_like(error)
        sq_total, sq_comp = neumaier_add(sq_total, sq_comp, np.square(error))
        err_total, err_comp = neumaier_add(err_total, err_comp, error)
        draws.append(realization.draws)
    return sq_total + sq_comp, err_total + err_comp, draws


def theoretical_curve(source, profile, truth, belief, spec):
    """
    Closed-form s.d. of `source` after every sample, from the decomposition of the clean, truth-parameter simulation.

    Integration predictions use `spec.kappa` (1 when unset) and `spec.sigma_l` (the sample s.d. of the clean current
    when unset). A fixed timing coefficient contributes its bias, since the Monte-Carlo estimate is centred on the
    true SOC.

    :return: [tuple] (curve, BudgetEntry)
    """
    source = Source.parse(source)
    clean = sample(profile, truth.delta_true)
    reference = BeliefParams.from_truth(truth)
    if spec.sigma_l is None and len(clean) > 1:
        spec = spec.replace(sigma_l=stats(clean, truth.c_true).sigma_l)
    if spec.kappa is None and source is Source.INTEGRATION:
        spec = spec.replace(kappa=1.0)
    entry = predict_combined(spec, reference, decompose_series(clean.samples, reference), c_ref=truth.c_true)
    bias = np.asarray(entry.timing_bias, dtype=float)
    if source is Source.COMBINED:
        curve = np.sqrt(np.asarray(entry.variance, dtype=float) + np.square(bias))
    elif source is Source.TIMING and spec.rho_delta_fixed is not None:
        curve = np.abs(bias)
    else:
        curve = entry.source(source)
    return np.broadcast_to(np.asarray(curve, dtype=float), (len(clean),)).copy(), entry


def relative_deviation(empirical, theoretical, burn_in=0):
    """
    Largest relative deviation |empirical - theoretical| / theoretical over the compared samples.

    Samples before the first theoretical value above `BURN_IN_FLOOR`, before `burn_in`, or with a theoretical value at
    or below the floor are not compared.

    :return: [tuple] (max_rel_dev or None, k_min)
    """
    above = np.flatnonzero(theoretical > BURN_IN_FLOOR)
    if above.size == 0:
        logger.warning("The theoretical s.d. is zero throughout; relative deviation is not evaluated")
        return None, int(burn_in)
    k_min = max(int(above[0]), int(burn_in))
    compared = theoretical[k_min:] > BURN_IN_FLOOR
    if not np.any(compared):
        logger.warning("No sample past the burn-in has a non-zero theoretical s.d.")
        return None, k_min
    deviation = np.abs(empirical[k_min:][compared] - theoretical[k_min:][compared]) / theoretical[k_min:][compared]
    return float(np.max(deviation)), k_min


def run_mc(source, profile, truth, belief, spec, runs, delta=None, s0=0.0, tolerance=None, burn_in=0, n_jobs=1,
           chunk_size=DEFAULT_CHUNK_SIZE):
    """
    Monte-Carlo estimate of the SOC-error s.d. caused by `source`, compared against its closed-form prediction.

    The empirical s.d. is centred on the true SOC: sqrt(sum over runs of (s_true(k) - s_m(k))^2 / M). Runs are cut
    into fixed chunks of `chunk_size`; chunks may run on `n_jobs` threads but are always reduced in order, so the
    result does not depend on `n_jobs`.

    :param source: [Source or string]
    :param profile: [SegmentProfile] Template true current.
    :param truth: [BatteryTruth]
    :param belief: [BeliefParams] Unperturbed belief of the counter.
    :param spec: [NoiseSpec] Noise parameters; `spec.seed` seeds every run.
    :param runs: [int] M >= 2.
    :param delta: [float] Sample period overriding `truth.delta_true` and `belief.delta`.
    :param s0: [float] Initial SOC.
    :param tolerance: [float] Acceptance tolerance on the relative deviation; per-source default when None.
    :param burn_in: [int] Samples skipped before comparing.
    :param n_jobs: [int] Worker threads.
    :param chunk_size: [int] Runs per chunk.
    :return: [McResult]
    """
    source = Source.parse(source)
    if not isinstance(spec, NoiseSpec):
        raise TypeError(f"Expected `NoiseSpec`, got {type(spec).__name__}")
    if int(runs) != runs or runs < 2:
        raise InvalidInputError(f"`runs` must be an integer >= 2, got {runs!r}")
    if int(n_jobs) != n_jobs or n_jobs < 1 or int(chunk_size) != chunk_size or chunk_size < 1:
        raise InvalidInputError("`n_jobs` and `chunk_size` must be positive integers")
    runs, n_jobs, chunk_size = int(runs), int(n_jobs), int(chunk_size)
    s0 = check_finite(s0, 's0')
    tolerance = default_tolerance(source) if tolerance is None else check_positive(tolerance, 'tolerance')
    truth, belief = _prepare(truth, belief, delta)

    chunks = [range(start, min(start + chunk_size, runs)) for start in range(0, runs, chunk_size)]
    logger.info("Running " + str(runs) + " Monte-Carlo runs of source '" + source.value + "' in " + str(len(chunks)) +
                " chunks on " + str(n_jobs) + " thread(s)")

    def work(chunk):
        return _run_chunk(chunk, source, profile, truth, belief, spec, s0)

    if n_jobs == 1:
        partials = list(map(work, chunks))
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            partials = list(pool.map(work, chunks))

    sq_total = sq_comp = err_total = err_comp = None
    draws = []
    for index, (sq_sum, err_sum, chunk_draws) in enumerate(partials):
        if sq_total is None:
            sq_total, sq_comp = np.zeros_like(sq_sum), np.zeros_like(sq_sum)
            err_total, err_comp = np.zeros_like(err_sum), np.zeros_like(err_sum)
        sq_total, sq_comp = neumaier_add(sq_total, sq_comp, sq_sum)
        err_total, err_comp = neumaier_add(err_total, err_comp, err_sum)
        draws.extend(chunk_draws)
        logger.debug("Reduced chunk " + str(index + 1) + " of " + str(len(partials)))

    empirical = np.sqrt(np.maximum(sq_total + sq_comp, 0.0) / runs)
    mean_error = (err_total + err_comp) / runs
    theoretical, entry = theoretical_curve(source, profile, truth, belief, spec)
    max_rel_dev, k_min = relative_deviation(empirical, theoretical, burn_in)

    diagnostics = {}
    if source in (Source.CAPACITY, Source.COMBINED) and spec.sigma_batt is not None:
        rho_c = spec.value('sigma_batt') / truth.c_true
        diagnostics['rho_c'] = rho_c
        diagnostics['exact_capacity_factor'] = exact_capacity_sd_factor(rho_c)
        drawn = np.array([d['c_batt'] for d in draws if 'c_batt' in d])
        if drawn.size:
            diagnostics['c_batt_draw_mean'] = float(np.mean(drawn))
            diagnostics['c_batt_draw_sd'] = float(np.std(drawn, ddof=1))
    if source is Source.INTEGRATION:
        diagnostics['kappa'] = 1.0 if spec.kappa is None else spec.kappa
    logger.info("Source '" + source.value + "': max relative deviation " + str(max_rel_dev) + " from k=" +
                str(k_min) + " (tolerance " + str(tolerance) + ")")
    return McResult(source, runs, empirical, theoretical, truth.delta_true, spec.seed, k_min, max_rel_dev,
                    tolerance, mean_error=mean_error, diagnostics=diagnostics)


def check_tolerance(result):
    """
    Raise a `ToleranceError` when the Monte-Carlo and closed-form curves of `result` disagree.
    """
    if not result.passed:
        message = (f"Source '{result.source.value}': max relative deviation {result.max_rel_dev:.4f} exceeds "
                   f"the tolerance {result.tolerance:.4f}")
        logger.error(message)
        raise ToleranceError(message)
    return result


def _check_load(profile, truth):
    clean = sample(profile, truth.delta_true)
    if len(clean) < 2:
        raise DegenerateProfileError("The profile is shorter than two sample periods")
    sigma_l = stats(clean, truth.c_true).sigma_l
    if sigma_l <= CONSTANT_LOAD_RTOL * max(float(np.max(np.abs(clean.samples))), 1.0):
        raise DegenerateProfileError("The sampled load is constant (sigma_L = 0); kappa is not identifiable")
    return sigma_l


def fit_kappa_mc(profile, truth, runs, delta=None, spec=None, belief=None, s0=0.0, burn_in=0, n_jobs=1,
                 chunk_size=DEFAULT_CHUNK_SIZE, tolerance=None):
    """
    Fit the integration constant kappa by least squares through the origin of the Monte-Carlo integration-error s.d.
    on the kappa = 1 prediction, and rescale the prediction by the fit.

    :param profile: [SegmentProfile] A non-constant profile.
    :param truth: [BatteryTruth]
    :param runs: [int] Monte-Carlo runs.
    :param delta: [float] Sample period overriding `truth.delta_true`.
    :param spec: [NoiseSpec] Only its seed is used; sigma_L is measured on the profile.
    :param belief: [BeliefParams] Defaults to the truth.
    :param tolerance: [float] Acceptance tolerance of the fitted curve; INTEGRATION_MC_TOLERANCE when None.
    :return: [tuple] (kappa_hat, McResult with the fitted theoretical curve)
    """
    belief = BeliefParams.from_truth(truth) if belief is None else belief
    tolerance = INTEGRATION_MC_TOLERANCE if tolerance is None else check_positive(tolerance, 'tolerance')
    truth, belief = _prepare(truth, belief, delta)
    sigma_l = _check_load(profile, truth)
    seed = 0 if spec is None else spec.seed
    unit_spec = NoiseSpec(kappa=1.0, sigma_l=sigma_l, seed=seed)
    unit = run_mc(Source.INTEGRATION, profile, truth, belief, unit_spec, runs, s0=s0, burn_in=burn_in,
                  n_jobs=n_jobs, chunk_size=chunk_size)
    kappa_hat = float(sm.OLS(unit.empirical_sd, unit.theoretical_sd).fit().params[0])
    kappa_hat = max(kappa_hat, 0.0)
    fitted = kappa_hat * unit.theoretical_sd
    max_rel_dev, k_min = relative_deviation(unit.empirical_sd, fitted, burn_in)
    logger.info("Fitted kappa = " + str(kappa_hat) + " with sigma_L = " + str(sigma_l) + " A")
    diagnostics = unit.diagnostics
    diagnostics.update({'kappa': kappa_hat, 'sigma_l': sigma_l})
    result = McResult(Source.INTEGRATION, unit.runs, unit.empirical_sd, fitted, unit.delta, unit.seed, k_min,
                      max_rel_dev, tolerance, mean_error=unit.mean_error, diagnostics=diagnostics)
    return kappa_hat, result


def fit_kappa(profile, truth, runs, delta=None, spec=None, **kwargs):
    """
    The least-squares estimate of the integration constant kappa of `profile`, see `fit_kappa_mc`.

    :return: [float] kappa_hat
    """
    return fit_kappa_mc(profile, truth, runs, delta=delta, spec=spec, **kwargs)[0]
