import numpy as np
import pandas as pd

from ..exceptions import InvalidInputError
from ..helpers import check_finite, check_positive


class SocTrace:
    """
    A time series of SOC fractions produced by Coulomb counting or by the geometric oracle.

    `values[j]` is the SOC after sample j + 1, i.e. at time (j + 1) * delta; the initial SOC `s0` is kept apart.
    Values are never clamped to [0, 1].
    """

    def __init__(self, s0, values, delta):
        """
        :param s0: [float] The initial SOC (fraction).
        :param values: [array-like] SOC after each sample.
        :param delta: [float] Sample period in seconds.
        """
        self.__s0 = check_finite(s0, 's0')
        values = np.array(values, dtype=float).ravel()
        if values.size and not np.all(np.isfinite(values)):
            raise InvalidInputError("SOC trace values must be finite")
        values.setflags(write=False)
        self.__values = values
        self.__delta = check_positive(delta, 'delta')

    @property
    def s0(self):
        return self.__s0

    @property
    def values(self):
        return self.__values

    @property
    def delta(self):
        return self.__delta

    @property
    def final(self):
        return self.__values[-1] if self.__values.size else self.__s0

    @property
    def times(self):
        return np.arange(1, self.__values.size + 1) * self.__delta

    def to_frame(self):
        return pd.DataFrame({'k': np.arange(1, self.__values.size + 1), 't_s': self.times, 'soc': self.__values})

    def __len__(self):
        return self.__values.size

    def __getitem__(self, item):
        return self.__values[item]

    def __repr__(self):
        return ('\n'.join([f"<SocTrace: {len(self)} samples at {self.delta} s",
                           f"Initial SOC: {self.s0}",
                           f"Final SOC: {self.final}>"]))


class CcDecomposition:
    """
    Accumulated Coulomb-counted SOC split into its charging and discharging parts.

    Attributes:
        - s_cc: [float] Total SOC change, always s_cc_c + s_cc_d.
        - s_cc_c: [float] Charging part (>= 0).
        - s_cc_d: [float] Discharging part (<= 0).
        - n_c: [int] Number of charging samples.
        - n_d: [int] Number of discharging samples.
    """

    def __init__(self, s_cc_c, s_cc_d, n_c, n_d):
        s_cc_c = check_finite(s_cc_c, 's_cc_c')
        s_cc_d = check_finite(s_cc_d, 's_cc_d')
        if s_cc_c < 0 or s_cc_d > 0:
            raise InvalidInputError(f"Expected s_cc_c >= 0 and s_cc_d <= 0, got {s_cc_c} and {s_cc_d}")
        if int(n_c) != n_c or int(n_d) != n_d or n_c < 0 or n_d < 0:
            raise InvalidInputError(f"Sample counts must be non-negative integers, got {n_c} and {n_d}")
        self.__s_cc_c = s_cc_c
        self.__s_cc_d = s_cc_d
        self.__n_c = int(n_c)
        self.__n_d = int(n_d)

    @property
    def s_cc(self):
        return self.__s_cc_c + self.__s_cc_d

    @property
    def s_cc_c(self):
        return self.__s_cc_c

    @property
    def s_cc_d(self):
        return self.__s_cc_d

    @property
    def n_c(self):
        return self.__n_c

    @property
    def n_d(self):
        return self.__n_d

    def to_dict(self):
        return {'s_cc': self.s_cc, 's_cc_c': self.s_cc_c, 's_cc_d': self.s_cc_d, 'n_c': self.n_c, 'n_d': self.n_d}

    def __repr__(self):
        return ('\n'.join([f"<CcDecomposition: s_cc={self.s_cc}",
                           f"Charging: {self.s_cc_c} over {self.n_c} samples",
                           f"Discharging: {self.s_cc_d} over {self.n_d} samples>"]))
