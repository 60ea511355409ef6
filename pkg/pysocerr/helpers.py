import math
import re

import numpy as np

from .exceptions import InvalidInputError

SECONDS_PER_HOUR = 3600.0
DAYS_PER_YEAR = 365
COMPENSATED_THRESHOLD = 100_000
COMPENSATED_BLOCK = 4096

# independent random streams of one Monte-Carlo run
STREAM_PROFILE = 0
STREAM_CURRENT = 1
STREAM_INTEGRATION = 2
STREAM_CAPACITY = 3
STREAM_EFFICIENCY = 4
STREAM_TIMING = 5
STREAM_VOLTAGE = 6

_HORIZON_UNITS = {'s': 1.0, 'm': 60.0, 'h': SECONDS_PER_HOUR, 'd': 86400.0, 'y': DAYS_PER_YEAR * 86400.0}


def check_finite(value, name):
    """
    Raise an `InvalidInputError` unless every element of `value` is finite.

    :param value: [float or array-like] The value(s) to check.
    :param name: [string] Name used in the error message.
    :return: [float or ndarray] The input as a float or float array.
    """
    array = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(array)):
        raise InvalidInputError(f"`{name}` must be finite, got {value!r}")
    return float(array) if array.ndim == 0 else array


def check_positive(value, name):
    value = check_finite(value, name)
    if value <= 0:
        raise InvalidInputError(f"`{name}` must be > 0, got {value}")
    return value


def check_nonnegative(value, name):
    array = np.asarray(value, dtype=float)
    if np.any(np.isnan(array)) or np.any(array < 0):
        raise InvalidInputError(f"`{name}` must be >= 0, got {value!r}")
    return float(array) if array.ndim == 0 else array


def percent(fraction):
    """SOC fraction to percent; only used at report boundaries."""
    return np.asarray(fraction, dtype=float) * 100.0


def fraction(pct):
    return np.asarray(pct, dtype=float) / 100.0


def parse_horizon(horizon):
    """
    Parse a horizon such as '1h', '24h', '30d', '1y' or a plain number of seconds.

    A year is `DAYS_PER_YEAR` days, which reproduces the published one-year columns
    (n = 31,536,000 at 1 s sampling).

    :param horizon: [string or float] The horizon.
    :return: [float] The horizon in seconds.
    """
    if isinstance(horizon, (int, float)):
        return check_positive(horizon, 'horizon')
    match = re.fullmatch(r'\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*([smhdy]?)\s*', str(horizon))
    if match is None:
        raise InvalidInputError(f"Cannot parse horizon {horizon!r}; use e.g. '3600', '1h', '24h', '30d' or '1y'.")
    value, unit = match.groups()
    return check_positive(float(value) * _HORIZON_UNITS[unit or 's'], 'horizon')


def rng_stream(seed, run_index=0, stream=0):
    """
    Counter-based random generator for one (seed, run, stream) triple.

    The Philox bit generator is keyed through a `SeedSequence` whose spawn key is (run_index, stream), so any run
    can be regenerated on its own, in any order and on any thread, with bit-identical draws.

    :param seed: [int] The experiment seed.
    :param run_index: [int] Index of the Monte-Carlo run.
    :param stream: [int] One of the STREAM_* constants.
    :return: [numpy.random.Generator]
    """
    if seed < 0 or run_index < 0 or stream < 0:
        raise InvalidInputError("seed, run_index and stream must be non-negative integers")
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(run_index), int(stream)))
    return np.random.Generator(np.random.Philox(sequence))


def compensated_cumsum(values, block_size=COMPENSATED_BLOCK):
    """
    Running sum of `values` that does not drift on very long traces.

    Short inputs use `np.cumsum`. From `COMPENSATED_THRESHOLD` samples on, the input is cut into blocks: each block is
    summed with numpy's pairwise summation and the block totals are carried with Neumaier compensation, so the
    round-off stays at block level instead of growing with the trace length.

    :param values: [array-like] The increments.
    :param block_size: [int] Block length for the compensated carry.
    :return: [ndarray] The running sums, same length as `values`.
    """
    values = np.asarray(values, dtype=float)
    if values.size < COMPENSATED_THRESHOLD:
        return np.cumsum(values)
    out = np.empty_like(values)
    total = 0.0
    compensation = 0.0
    for start in range(0, values.size, block_size):
        block = values[start:start + block_size]
        out[start:start + block.size] = np.cumsum(block) + (total + compensation)
        block_total = float(np.sum(block))
        running = total + block_total
        if abs(total) >= abs(block_total):
            compensation += (total - running) + block_total
        else:
            compensation += (block_total - running) + total
        total = running
    return out


def compensated_sum(values):
    return math.fsum(np.asarray(values, dtype=float).ravel())


def neumaier_add(total, compensation, values):
    """
    Element-wise Neumaier accumulation of `values` into (`total`, `compensation`).

    :return: [tuple] The updated (total, compensation) arrays.
    """
    running = total + values
    compensation = compensation + np.where(np.abs(total) >= np.abs(values),
                                           (total - running) + values,
                                           (values - running) + total)
    return running, compensation
