import numpy as np
import pandas as pd

from ..exceptions import InvalidInputError
from ..helpers import check_finite, check_positive, check_nonnegative


class SegmentProfile:
    """
    A piecewise-constant true current: a sequence of (duration, amplitude) segments starting at t = 0.

    Segment j covers the half-open interval (boundaries[j], boundaries[j + 1]], which is what makes the profile
    exactly integrable as a sum of signed rectangle areas.
    """

    def __init__(self, durations, amplitudes):
        """
        :param durations: [array-like] Segment durations in seconds, all > 0.
        :param amplitudes: [array-like] Segment currents in amperes (positive = charging).
        """
        durations = np.array(durations, dtype=float).ravel()
        amplitudes = np.array(amplitudes, dtype=float).ravel()
        if durations.size != amplitudes.size:
            raise InvalidInputError(f"Got {durations.size} durations but {amplitudes.size} amplitudes")
        if durations.size == 0:
            raise InvalidInputError("A segment profile needs at least one segment")
        if not np.all(np.isfinite(durations)) or np.any(durations <= 0):
            raise InvalidInputError("Every segment duration must be finite and > 0")
        if not np.all(np.isfinite(amplitudes)):
            raise InvalidInputError("Every segment amplitude must be finite")
        durations.setflags(write=False)
        amplitudes.setflags(write=False)
        self.__durations = durations
        self.__amplitudes = amplitudes
        boundaries = np.concatenate(([0.0], np.cumsum(durations)))
        boundaries.setflags(write=False)
        self.__boundaries = boundaries

    @classmethod
    def from_segments(cls, segments):
        """:param segments: [iterable] (duration, amplitude) pairs."""
        segments = list(segments)
        return cls([d for d, _ in segments], [a for _, a in segments])

    @classmethod
    def constant(cls, amplitude, duration):
        return cls([duration], [amplitude])

    @property
    def durations(self):
        return self.__durations

    @property
    def amplitudes(self):
        return self.__amplitudes

    @property
    def boundaries(self):
        return self.__boundaries

    @property
    def total_duration(self):
        return float(self.__boundaries[-1])

    @property
    def segments(self):
        return list(zip(self.__durations.tolist(), self.__amplitudes.tolist()))

    def with_amplitudes(self, amplitudes):
        return SegmentProfile(self.__durations, amplitudes)

    def concat(self, other):
        return SegmentProfile(np.concatenate((self.durations, other.durations)),
                              np.concatenate((self.amplitudes, other.amplitudes)))

    def is_aligned(self, delta, tolerance=1e-9):
        """True when every segment boundary is an integer multiple of `delta`."""
        ratio = self.__boundaries / delta
        return bool(np.all(np.abs(ratio - np.round(ratio)) <= tolerance * np.maximum(1.0, ratio)))

    def to_frame(self):
        return pd.DataFrame({'duration_s': self.__durations, 'amps': self.__amplitudes})

    def __len__(self):
        return self.__durations.size

    def __eq__(self, other):
        return isinstance(other, SegmentProfile) and np.array_equal(self.durations, other.durations) and \
            np.array_equal(self.amplitudes, other.amplitudes)

    def __hash__(self):
        return hash((self.durations.tobytes(), self.amplitudes.tobytes()))

    def __repr__(self):
        return ('\n'.join([f"<SegmentProfile: {len(self)} segments",
                           f"Total duration: {self.total_duration} s",
                           f"Amplitude range: [{self.amplitudes.min()}, {self.amplitudes.max()}] A>"]))


class SampledCurrent:
    """
    Uniformly sampled current: `samples[j]` is the current at time (j + 1) * delta.
    """

    def __init__(self, delta, samples):
        self.__delta = check_positive(delta, 'delta')
        samples = np.array(samples, dtype=float).ravel()
        if samples.size and not np.all(np.isfinite(samples)):
            raise InvalidInputError("Current samples must be finite")
        samples.setflags(write=False)
        self.__samples = samples

    @property
    def delta(self):
        return self.__delta

    @property
    def samples(self):
        return self.__samples

    @property
    def times(self):
        return np.arange(1, self.__samples.size + 1) * self.__delta

    def with_samples(self, samples):
        return SampledCurrent(self.__delta, samples)

    def to_frame(self):
        return pd.DataFrame({'t_s': self.times, 'i_a': self.__samples})

    def __len__(self):
        return self.__samples.size

    def __repr__(self):
        return f"<SampledCurrent: {len(self)} samples at {self.delta} s>"


class LoadStats:
    """
    Load statistics of a sampled current.

    Attributes:
        - sigma_l: [float] Sample standard deviation of the load current in amperes.
        - rho_i_coeff: [float] sigma_i / c_batt in 1/hour.
        - rho_int_coeff: [float] sigma_l / c_batt in 1/hour.
        - diff_histogram: [pandas.DataFrame] Columns `bin_left`, `bin_right`, `count` for i(k) - i(k-1).
    """

    def __init__(self, sigma_l, rho_i_coeff, rho_int_coeff, diff_histogram, mean_current=0.0, n_samples=0):
        self.__sigma_l = check_nonnegative(sigma_l, 'sigma_l')
        self.__rho_i_coeff = check_nonnegative(rho_i_coeff, 'rho_i_coeff')
        self.__rho_int_coeff = check_nonnegative(rho_int_coeff, 'rho_int_coeff')
        if not isinstance(diff_histogram, pd.DataFrame):
            raise TypeError("`diff_histogram` must be a pandas DataFrame")
        self.__diff_histogram = diff_histogram
        self.__mean_current = check_finite(mean_current, 'mean_current')
        self.__n_samples = int(n_samples)

    @property
    def sigma_l(self):
        return self.__sigma_l

    @property
    def rho_i_coeff(self):
        return self.__rho_i_coeff

    @property
    def rho_int_coeff(self):
        return self.__rho_int_coeff

    @property
    def diff_histogram(self):
        return self.__diff_histogram

    @property
    def mean_current(self):
        return self.__mean_current

    @property
    def n_samples(self):
        return self.__n_samples

    def to_dict(self):
        return {'sigma_l': self.sigma_l, 'rho_i_coeff': self.rho_i_coeff, 'rho_int_coeff': self.rho_int_coeff,
                'mean_current': self.mean_current, 'n_samples': self.n_samples}

    def __repr__(self):
        return ('\n'.join([f"<LoadStats: sigma_L={self.sigma_l} A over {self.n_samples} samples",
                           f"rho_i: {self.rho_i_coeff} /h",
                           f"rho_I: {self.rho_int_coeff} /h>"]))
