import numpy as np
import numpy.polynomial.polynomial as poly
import pandas as pd

from ..exceptions import InvalidInputError
from ..helpers import check_finite, check_nonnegative

# 5th-order OCV stand-in, ascending powers of SOC, volts
DEFAULT_OCV_COEFFS = (3.2, 0.9, -0.9, 1.2, -0.75, 0.2)
DEFAULT_DROP_TAPS = (0.05,)
DEFAULT_SIGMA_Z = 0.01
UNINFORMATIVE_SIGMA_Z = 1e6
MONOTONICITY_GRID = 1001


class FilterState:
    """
    State of the recursive SOC tracker after step k: the SOC estimate, its error variance and the Coulomb-counted
    SOC accumulated since the last reset, split into its charging and discharging parts.

    States are immutable; every filter step returns a new one.
    """

    def __init__(self, s_hat, p, k=0, s_cc_c_running=0.0, s_cc_d_running=0.0):
        self.__s_hat = check_finite(s_hat, 's_hat')
        p = check_finite(p, 'p')
        if p < 0:
            raise InvalidInputError(f"Variance `p` must be >= 0, got {p}")
        self.__p = p
        self.__k = int(k)
        self.__s_cc_c_running = check_finite(s_cc_c_running, 's_cc_c_running')
        self.__s_cc_d_running = check_finite(s_cc_d_running, 's_cc_d_running')

    @property
    def s_hat(self):
        return self.__s_hat

    @property
    def p(self):
        return self.__p

    @property
    def k(self):
        return self.__k

    @property
    def s_cc_running(self):
        return self.__s_cc_c_running + self.__s_cc_d_running

    @property
    def s_cc_c_running(self):
        return self.__s_cc_c_running

    @property
    def s_cc_d_running(self):
        return self.__s_cc_d_running

    def replace(self, **changes):
        fields = {'s_hat': self.s_hat, 'p': self.p, 'k': self.k, 's_cc_c_running': self.s_cc_c_running,
                  's_cc_d_running': self.s_cc_d_running}
        fields.update(changes)
        return FilterState(**fields)

    def to_dict(self):
        return {'k': self.k, 's_hat': self.s_hat, 'p': self.p, 's_cc_running': self.s_cc_running,
                's_cc_c_running': self.s_cc_c_running, 's_cc_d_running': self.s_cc_d_running}

    def __eq__(self, other):
        return isinstance(other, FilterState) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(tuple(self.to_dict().items()))

    def __repr__(self):
        return ('\n'.join([f"<FilterState: k={self.k}",
                           f"SOC estimate: {self.s_hat} (variance {self.p})",
                           f"Accumulated SOC: {self.s_cc_running}>"]))


class MeasurementModel:
    """
    Terminal-voltage model of the tracker: z_v(k) = V_ocv(s(k)) + a(k)^T b + n_z(k).

    `V_ocv` is a polynomial in SOC that must be strictly increasing on [0, 1]. The regressor a(k) holds the current
    and its lagged values [i(k), i(k-1), ..., i(k-L+1)], so `b` acts as a short FIR voltage-drop filter (ohms).
    """

    def __init__(self, ocv_coeffs=DEFAULT_OCV_COEFFS, b=DEFAULT_DROP_TAPS, sigma_z=DEFAULT_SIGMA_Z):
        """
        :param ocv_coeffs: [array-like] OCV polynomial coefficients in ascending powers of SOC, volts.
        :param b: [array-like] Voltage-drop taps in volts per ampere; may be empty.
        :param sigma_z: [float] Voltage-noise s.d. in volts; `numpy.inf` disables measurement updates.
        """
        ocv_coeffs = np.array(ocv_coeffs, dtype=float).ravel()
        if ocv_coeffs.size < 2 or not np.all(np.isfinite(ocv_coeffs)):
            raise InvalidInputError("OCV coefficients must be finite with at least a linear term")
        grid = np.linspace(0.0, 1.0, MONOTONICITY_GRID)
        if not np.all(np.diff(poly.polyval(grid, ocv_coeffs)) > 0):
            raise InvalidInputError("The OCV polynomial must be strictly increasing on [0, 1]")
        b = np.array(b, dtype=float).ravel()
        if b.size and not np.all(np.isfinite(b)):
            raise InvalidInputError("Voltage-drop taps must be finite")
        sigma_z = float(sigma_z)
        if np.isnan(sigma_z):
            raise InvalidInputError("`sigma_z` must not be NaN")
        self.__ocv_coeffs = ocv_coeffs
        self.__docv_coeffs = poly.polyder(ocv_coeffs)
        self.__b = b
        self.__sigma_z = check_nonnegative(sigma_z, 'sigma_z')

    @property
    def ocv_coeffs(self):
        return self.__ocv_coeffs.copy()

    @property
    def b(self):
        return self.__b.copy()

    @property
    def sigma_z(self):
        return self.__sigma_z

    @property
    def informative(self):
        """False for sigma_z >= UNINFORMATIVE_SIGMA_Z, where updates are skipped."""
        return self.__sigma_z < UNINFORMATIVE_SIGMA_Z

    def ocv(self, soc):
        return poly.polyval(soc, self.__ocv_coeffs)

    def docv(self, soc):
        return poly.polyval(soc, self.__docv_coeffs)

    def regressors(self, currents):
        """
        Build a(k) for every sample: row k is [i(k), i(k-1), ..., i(k-L+1)], zero-padded before the first sample.

        :param currents: [array-like] Current samples.
        :return: [ndarray] Shape (n, L).
        """
        currents = np.asarray(currents, dtype=float)
        taps = self.__b.size
        padded = np.concatenate((np.zeros(max(taps - 1, 0)), currents))
        if taps == 0:
            return np.zeros((currents.size, 0))
        return np.lib.stride_tricks.sliding_window_view(padded, taps)[:, ::-1]

    def voltage_drop(self, regressor):
        return float(np.dot(regressor, self.__b)) if self.__b.size else 0.0

    def to_dict(self):
        return {'ocv_coeffs': self.__ocv_coeffs.tolist(), 'b': self.__b.tolist(),
                'sigma_z': self.sigma_z if np.isfinite(self.sigma_z) else 'inf'}

    def __repr__(self):
        return ('\n'.join([f"<MeasurementModel: OCV coefficients {self.__ocv_coeffs.tolist()}",
                           f"Voltage-drop taps: {self.__b.tolist()}",
                           f"Noise s.d.: {self.sigma_z} V>"]))


class TrackResult:
    """
    Output of one closed-loop tracker run.

    `frame` has the columns k, t_s, s_true, s_cc_open_loop, s_hat, p, z_v with one row per sample.
    """

    def __init__(self, frame, final_state, rule, seed, run_index=0):
        if not isinstance(frame, pd.DataFrame):
            raise TypeError("`frame` must be a pandas DataFrame")
        self.__frame = frame
        self.__final_state = final_state
        self.__rule = rule
        self.__seed = int(seed)
        self.__run_index = int(run_index)

    @property
    def frame(self):
        return self.__frame.copy()

    @property
    def final_state(self):
        return self.__final_state

    @property
    def rule(self):
        return self.__rule

    @property
    def seed(self):
        return self.__seed

    @property
    def run_index(self):
        return self.__run_index

    @property
    def estimate(self):
        return self.__frame['s_hat'].to_numpy()

    @property
    def variance(self):
        return self.__frame['p'].to_numpy()

    @property
    def rmse(self):
        error = self.__frame['s_hat'].to_numpy() - self.__frame['s_true'].to_numpy()
        return float(np.sqrt(np.mean(np.square(error)))) if error.size else 0.0

    @property
    def open_loop_rmse(self):
        error = self.__frame['s_cc_open_loop'].to_numpy() - self.__frame['s_true'].to_numpy()
        return float(np.sqrt(np.mean(np.square(error)))) if error.size else 0.0

    def to_dict(self):
        return {'rule': self.rule, 'seed': self.seed, 'run_index': self.run_index, 'rmse': self.rmse,
                'open_loop_rmse': self.open_loop_rmse, 'final_state': self.final_state.to_dict()}

    def __len__(self):
        return len(self.__frame)

    def __repr__(self):
        return ('\n'.join([f"<TrackResult: {len(self)} samples, rule={self.rule}, seed={self.seed}",
                           f"RMSE: {self.rmse} (open loop {self.open_loop_rmse})>"]))
