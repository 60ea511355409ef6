"""
Perfectly integrable current profiles, the geometric Coulomb oracle and load statistics.
"""
import logging
import math

import numpy as np
import pandas as pd

from .classes.Battery import BatteryTruth
from .classes.SegmentProfile import SegmentProfile, SampledCurrent, LoadStats
from .classes.SocTrace import SocTrace
from .exceptions import InvalidInputError, InvalidSpecError
from .helpers import (SECONDS_PER_HOUR, STREAM_PROFILE, check_finite, check_nonnegative, check_positive,
                      compensated_cumsum, rng_stream)

logger = logging.getLogger(__name__)

HISTOGRAM_BINS = 101
HISTOGRAM_HALF_WIDTH_SD = 5
# relative slack when locating a sampling instant on a segment boundary
BOUNDARY_EPS = 1e-9


def _check_range(value_range, name, positive=False):
    try:
        lo, hi = (float(value) for value in value_range)
    except (TypeError, ValueError):
        raise InvalidSpecError(f"`{name}` must be a (low, high) pair, got {value_range!r}")
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise InvalidSpecError(f"`{name}` must be finite, got {value_range!r}")
    if lo > hi:
        raise InvalidSpecError(f"`{name}` is empty: low {lo} > high {hi}")
    if positive and lo <= 0:
        raise InvalidSpecError(f"`{name}` must lie above 0, got {value_range!r}")
    return lo, hi


def generate_profile(count, amplitude_range, duration_range, seed, quantum=None):
    """
    Draw a random piecewise-constant current profile.

    Amplitudes and durations are uniform over their ranges. With `quantum`, every duration is an integer multiple of
    it, which gives profiles whose boundaries are aligned to any sample period dividing `quantum`.

    :param count: [int] Number of segments (>= 1).
    :param amplitude_range: [tuple] (low, high) amplitude in amperes.
    :param duration_range: [tuple] (low, high) duration in seconds, low > 0.
    :param seed: [int] Seed; equal seeds give equal profiles.
    :param quantum: [float] Optional duration quantum in seconds.
    :return: [SegmentProfile]
    """
    if int(count) != count or count < 1:
        raise InvalidSpecError(f"`count` must be an integer >= 1, got {count!r}")
    count = int(count)
    amp_lo, amp_hi = _check_range(amplitude_range, 'amplitude_range')
    dur_lo, dur_hi = _check_range(duration_range, 'duration_range', positive=True)
    rng = rng_stream(seed, 0, STREAM_PROFILE)
    amplitudes = rng.uniform(amp_lo, amp_hi, size=count)
    if quantum is None:
        durations = rng.uniform(dur_lo, dur_hi, size=count)
    else:
        quantum = check_positive(quantum, 'quantum')
        lo_multiple = max(1, math.ceil(dur_lo / quantum - BOUNDARY_EPS))
        hi_multiple = math.floor(dur_hi / quantum + BOUNDARY_EPS)
        if lo_multiple > hi_multiple:
            raise InvalidSpecError(f"No multiple of {quantum} s lies in the duration range {duration_range!r}")
        durations = rng.integers(lo_multiple, hi_multiple, size=count, endpoint=True) * quantum
    logger.info("Generated a profile of " + str(count) + " segments over " + str(float(np.sum(durations))) + " s")
    return SegmentProfile(durations, amplitudes)


def shuffle_amplitudes(profile, rng):
    """
    Permute the amplitudes of `profile` over its fixed segment boundaries.

    :param profile: [SegmentProfile]
    :param rng: [numpy.random.Generator]
    :return: [SegmentProfile] Same boundaries and load s.d., new order of amplitudes.
    """
    return profile.with_amplitudes(rng.permutation(profile.amplitudes))


def short_segment_kappa(duration_range, delta):
    """
    Integration constant of generated profiles whose uniform segment durations are all at most one sample period.

    A segment of relative length d = duration / delta holds a sampling instant with probability d, so the mean square
    of its rectangle-error weight is d (1 - d)^2 + (1 - d) d^2 = d (1 - d). Per sample period this gives
    kappa^2 = E[d (1 - d)] / E[d]; (0.05, 0.25) s at delta = 1 s gives 0.9098.

    :param duration_range: [tuple] (low, high) duration in seconds, high <= delta.
    :param delta: [float] Sample period in seconds.
    :return: [float]
    """
    low, high = _check_range(duration_range, 'duration_range', positive=True)
    delta = check_positive(delta, 'delta')
    if high > delta:
        raise InvalidInputError(f"Segments of up to {high} s are longer than the sample period {delta} s")
    low, high = low / delta, high / delta
    mean = (low + high) / 2
    mean_square = (low * low + low * high + high * high) / 3
    return float(np.sqrt((mean - mean_square) / mean))


def exact_coulombs(profile, up_to):
    """
    Exact charge delivered by the profile over [0, up_to]: the sum of signed rectangle areas.

    :param profile: [SegmentProfile]
    :param up_to: [float] Time in seconds, 0 <= up_to <= total_duration.
    :return: [float] Ampere-seconds.
    """
    up_to = check_finite(up_to, 'up_to')
    if up_to < 0 or up_to > profile.total_duration:
        raise InvalidInputError(f"`up_to` must lie in [0, {profile.total_duration}], got {up_to}")
    covered = np.clip(up_to - profile.boundaries[:-1], 0.0, profile.durations)
    return math.fsum(profile.amplitudes * covered)


def _weighted_area(profile, times, weights):
    """
    Vectorized cumulative area of weights * amplitude over [0, t] for every t in `times`.
    """
    areas = weights * profile.amplitudes * profile.durations
    before = np.concatenate(([0.0], compensated_cumsum(areas)))
    index = np.clip(np.searchsorted(profile.boundaries, times, side='right') - 1, 0, len(profile) - 1)
    partial = weights[index] * profile.amplitudes[index] * (times - profile.boundaries[index])
    return before[index] + partial


def sample_count(total_duration, delta):
    """Number of whole sample periods within `total_duration`."""
    return int(math.floor(total_duration / delta + BOUNDARY_EPS))


def true_soc_trace(profile, truth, s0=0.0, delta=None):
    """
    True SOC at every sampling instant k * delta, computed geometrically from the segment areas.

    The true efficiency is chosen per segment by the sign of its amplitude.

    :param profile: [SegmentProfile]
    :param truth: [BatteryTruth]
    :param s0: [float] Initial SOC.
    :param delta: [float] Sample period in seconds; defaults to `truth.delta_true`.
    :return: [SocTrace]
    """
    if not isinstance(truth, BatteryTruth):
        raise TypeError(f"Expected `BatteryTruth`, got {type(truth).__name__}")
    s0 = check_finite(s0, 's0')
    delta = truth.delta_true if delta is None else check_positive(delta, 'delta')
    times = np.arange(1, sample_count(profile.total_duration, delta) + 1) * delta
    times = np.minimum(times, profile.total_duration)
    weights = np.where(profile.amplitudes < 0, truth.eta_d_true, truth.eta_c_true)
    coulombs = _weighted_area(profile, times, weights)
    return SocTrace(s0, s0 + coulombs / (SECONDS_PER_HOUR * truth.c_true), delta)


def sample_times(profile, delta, clock_error=0.0):
    """True instants at which a clock running fast by `clock_error` takes its samples."""
    delta = check_positive(delta, 'delta')
    clock_error = check_finite(clock_error, 'clock_error')
    if clock_error <= -1:
        raise InvalidInputError(f"`clock_error` must be > -1, got {clock_error}")
    effective = delta / (1.0 + clock_error)
    times = np.arange(1, sample_count(profile.total_duration, effective) + 1) * effective
    return times, effective


def sample(profile, delta, clock_error=0.0):
    """
    Downsample a profile with the right-endpoint convention: sample k carries the current at the k-th sampling
    instant, which is k * delta on an exact clock and k * delta / (1 + clock_error) on a fast one.

    :param profile: [SegmentProfile]
    :param delta: [float] Nominal sample period in seconds.
    :param clock_error: [float] Timing coefficient rho_delta of the sampling clock.
    :return: [SampledCurrent] Samples labelled with the nominal period `delta`.
    """
    times, effective = sample_times(profile, delta, clock_error)
    index = np.searchsorted(profile.boundaries, times - BOUNDARY_EPS * effective, side='left') - 1
    index = np.clip(index, 0, len(profile) - 1)
    return SampledCurrent(delta, profile.amplitudes[index])


def _diff_histogram(diffs):
    spread = float(pd.Series(diffs).std(ddof=1)) if diffs.size > 1 else 0.0
    half_width = HISTOGRAM_HALF_WIDTH_SD * spread if spread > 0 else 1.0
    edges = np.linspace(-half_width, half_width, HISTOGRAM_BINS + 1)
    counts, _ = np.histogram(np.clip(diffs, -half_width, half_width), bins=edges)
    return pd.DataFrame({'bin_left': edges[:-1], 'bin_right': edges[1:], 'count': counts})


def stats(sc, c_batt, sigma_i=0.0):
    """
    Load statistics of a sampled current.

    :param sc: [SampledCurrent] At least two samples.
    :param c_batt: [float] Capacity in ampere-hours the coefficients are normalized by.
    :param sigma_i: [float] Current-sensor noise s.d. in amperes, for the rho_i coefficient.
    :return: [LoadStats] sigma_L (sample s.d.), rho_i = sigma_i / c_batt and rho_I = sigma_L / c_batt in 1/hour, and
        the histogram of first differences (outliers beyond the histogram span land in the edge bins).
    """
    if not isinstance(sc, SampledCurrent):
        raise TypeError(f"Expected `SampledCurrent`, got {type(sc).__name__}")
    if len(sc) < 2:
        raise InvalidInputError(f"Load statistics need at least 2 samples, got {len(sc)}")
    c_batt = check_positive(c_batt, 'c_batt')
    sigma_i = check_nonnegative(sigma_i, 'sigma_i')
    currents = pd.Series(sc.samples)
    sigma_l = float(currents.std(ddof=1))
    return LoadStats(sigma_l=sigma_l, rho_i_coeff=sigma_i / c_batt, rho_int_coeff=sigma_l / c_batt,
                     diff_histogram=_diff_histogram(np.diff(sc.samples)), mean_current=float(currents.mean()),
                     n_samples=len(sc))
