"""
The discrete Coulomb counter and the charge/discharge decomposition of the SOC it accumulates.
"""

import numpy as np
import pandas as pd

from .classes.Battery import BeliefParams
from .classes.SocTrace import SocTrace, CcDecomposition
from .exceptions import InvalidInputError
from .helpers import SECONDS_PER_HOUR, check_finite, compensated_cumsum, compensated_sum


def _check_belief(belief):
    if not isinstance(belief, BeliefParams):
        raise TypeError(f"Expected `BeliefParams`, got {type(belief).__name__}")


def _as_currents(currents):
    currents = np.asarray(currents, dtype=float).ravel()
    if currents.size and not np.all(np.isfinite(currents)):
        bad = int(np.flatnonzero(~np.isfinite(currents))[0])
        raise InvalidInputError(f"Current samples must be finite; sample {bad} is {currents[bad]}")
    return currents


def soc_increments(currents, belief):
    """
    Per-sample SOC change eta * delta * i / (3600 * c_batt), with eta_c for charging and eta_d for discharging samples.

    :param currents: [array-like] Current samples in amperes.
    :param belief: [BeliefParams] The counter's parameters.
    :return: [ndarray] One increment per sample.
    """
    _check_belief(belief)
    currents = _as_currents(currents)
    return belief.efficiencies(currents) * belief.delta * currents / (SECONDS_PER_HOUR * belief.c_batt)


def cc_step(s_prev, i, belief):
    """
    One Coulomb-counting step.

    :param s_prev: [float] SOC before the sample.
    :param i: [float] Current sample in amperes (positive = charging).
    :param belief: [BeliefParams] The counter's parameters.
    :return: [float] SOC after the sample, not clamped.
    """
    _check_belief(belief)
    s_prev = check_finite(s_prev, 's_prev')
    i = check_finite(i, 'i')
    return s_prev + belief.efficiency(i) * belief.delta * i / (SECONDS_PER_HOUR * belief.c_batt)


def cc_trace(currents, s0, belief):
    """
    Run the Coulomb counter over a sequence of current samples.

    Long traces are accumulated with compensated summation so that round-off does not masquerade as SOC error.

    :param currents: [array-like] Current samples in amperes.
    :param s0: [float] Initial SOC.
    :param belief: [BeliefParams] The counter's parameters.
    :return: [SocTrace] SOC after every sample.
    """
    s0 = check_finite(s0, 's0')
    increments = soc_increments(currents, belief)
    return SocTrace(s0, s0 + compensated_cumsum(increments), belief.delta)


def decompose(currents, belief):
    """
    Split the accumulated SOC change into its charging and discharging parts.

    Zero-current samples are counted neither as charging nor as discharging.

    :param currents: [array-like] Current samples in amperes.
    :param belief: [BeliefParams] The counter's parameters.
    :return: [CcDecomposition]
    """
    currents = _as_currents(currents)
    increments = soc_increments(currents, belief)
    charging = currents > 0
    discharging = currents < 0
    return CcDecomposition(s_cc_c=max(compensated_sum(increments[charging]), 0.0),
                           s_cc_d=min(compensated_sum(increments[discharging]), 0.0),
                           n_c=int(np.count_nonzero(charging)), n_d=int(np.count_nonzero(discharging)))


def decompose_series(currents, belief):
    """
    The decomposition after every sample: row j holds s_cc, s_cc_c, s_cc_d, n_c and n_d over samples 1..j+1.

    :return: [pandas.DataFrame] Columns `k`, `s_cc`, `s_cc_c`, `s_cc_d`, `n_c`, `n_d`.
    """
    currents = _as_currents(currents)
    increments = soc_increments(currents, belief)
    s_cc_c = compensated_cumsum(np.where(currents > 0, increments, 0.0))
    s_cc_d = compensated_cumsum(np.where(currents < 0, increments, 0.0))
    return pd.DataFrame({'k': np.arange(1, currents.size + 1),
                         's_cc': s_cc_c + s_cc_d,
                         's_cc_c': s_cc_c,
                         's_cc_d': s_cc_d,
                         'n_c': np.cumsum(currents > 0),
                         'n_d': np.cumsum(currents < 0)})
