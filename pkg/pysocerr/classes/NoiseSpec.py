from enum import Enum

import numpy as np
import pandas as pd

from ..exceptions import ConfigurationError, InvalidInputError
from ..helpers import check_finite, check_nonnegative


class Source(Enum):
    """The error mechanisms an injector can switch on."""
    CURRENT = 'current'
    INTEGRATION = 'integration'
    CAPACITY = 'capacity'
    EFFICIENCY = 'efficiency'
    TIMING = 'timing'
    COMBINED = 'combined'

    @classmethod
    def parse(cls, source):
        if isinstance(source, cls):
            return source
        try:
            return cls(str(source).lower())
        except ValueError:
            raise ConfigurationError(f"Unknown error source {source!r}, valid sources are "
                                     f"{[member.value for member in cls]}")

    @property
    def classification(self):
        return SOURCE_CLASSIFICATION.get(self.value)


TIME_CUMULATIVE = 'time-cumulative'
SOC_PROPORTIONAL = 'soc-proportional'

SOURCE_CLASSIFICATION = {'current': TIME_CUMULATIVE, 'integration': TIME_CUMULATIVE,
                         'capacity': SOC_PROPORTIONAL, 'efficiency': SOC_PROPORTIONAL, 'timing': SOC_PROPORTIONAL}

# budget column per source
BUDGET_COLUMNS = {'current': 'sigma_s_i', 'integration': 'sigma_s_int', 'capacity': 'sigma_s_c',
                  'efficiency': 'sigma_s_eta', 'timing': 'sigma_s_delta'}

_SD_FIELDS = ('sigma_i', 'kappa', 'sigma_l', 'sigma_batt', 'sigma_eta_c', 'sigma_eta_d', 'sigma_delta')


class NoiseSpec:
    """
    Standard deviations and coefficients of the five error sources.

    Every field is optional. A field left as None counts as zero in the closed-form predictors, but an injector
    refuses to switch on a source whose parameters were never given.

    Attributes:
        - sigma_i: [float] Current-noise s.d. in amperes.
        - kappa: [float] Integration-error constant.
        - sigma_l: [float] Load-current s.d. in amperes.
        - sigma_batt: [float] Capacity s.d. in ampere-hours.
        - sigma_eta_c, sigma_eta_d: [float] S.d. of the charging/discharging efficiency coefficients.
        - sigma_delta: [float] S.d. of the timing coefficient.
        - rho_delta_fixed: [float] Deterministic timing coefficient; exclusive with `sigma_delta`.
        - seed: [int] Experiment seed.
        - efficiency_squared: [bool] Weight sample counts by squared efficiencies in the time-cumulative variances.
    """

    def __init__(self, sigma_i=None, kappa=None, sigma_l=None, sigma_batt=None, sigma_eta_c=None, sigma_eta_d=None,
                 sigma_delta=None, rho_delta_fixed=None, seed=0, efficiency_squared=False):
        fields = dict(sigma_i=sigma_i, kappa=kappa, sigma_l=sigma_l, sigma_batt=sigma_batt, sigma_eta_c=sigma_eta_c,
                      sigma_eta_d=sigma_eta_d, sigma_delta=sigma_delta)
        self.__fields = {name: (None if value is None else check_nonnegative(check_finite(value, name), name))
                         for name, value in fields.items()}
        self.__rho_delta_fixed = None if rho_delta_fixed is None else check_finite(rho_delta_fixed, 'rho_delta_fixed')
        if self.__rho_delta_fixed is not None and (self.__fields['sigma_delta'] or 0.0) > 0:
            raise ConfigurationError("Specify either a stochastic timing s.d. (`sigma_delta`) or a deterministic "
                                     "timing coefficient (`rho_delta_fixed`), not both")
        if int(seed) != seed or seed < 0:
            raise InvalidInputError(f"`seed` must be a non-negative integer, got {seed!r}")
        self.__seed = int(seed)
        if not isinstance(efficiency_squared, bool):
            raise TypeError("`efficiency_squared` must be a bool")
        self.__efficiency_squared = efficiency_squared

    @classmethod
    def from_dict(cls, dictionary):
        unknown = set(dictionary) - set(_SD_FIELDS) - {'rho_delta_fixed', 'seed', 'efficiency_squared'}
        if unknown:
            raise ConfigurationError(f"Unknown NoiseSpec field(s): {sorted(unknown)}")
        return cls(**dictionary)

    @property
    def sigma_i(self):
        return self.__fields['sigma_i']

    @property
    def kappa(self):
        return self.__fields['kappa']

    @property
    def sigma_l(self):
        return self.__fields['sigma_l']

    @property
    def sigma_batt(self):
        return self.__fields['sigma_batt']

    @property
    def sigma_eta_c(self):
        return self.__fields['sigma_eta_c']

    @property
    def sigma_eta_d(self):
        return self.__fields['sigma_eta_d']

    @property
    def sigma_delta(self):
        return self.__fields['sigma_delta']

    @property
    def rho_delta_fixed(self):
        return self.__rho_delta_fixed

    @property
    def seed(self):
        return self.__seed

    @property
    def efficiency_squared(self):
        return self.__efficiency_squared

    def value(self, name):
        """The field `name` with None read as 0."""
        value = self.rho_delta_fixed if name == 'rho_delta_fixed' else self.__fields[name]
        return 0.0 if value is None else value

    def require(self, source):
        """
        Raise a `ConfigurationError` unless the parameters of `source` were given.

        :param source: [Source or string] The source an injector is about to switch on.
        """
        source = Source.parse(source)
        needed = {Source.CURRENT: [('sigma_i',)],
                  Source.CAPACITY: [('sigma_batt',)],
                  Source.EFFICIENCY: [('sigma_eta_c', 'sigma_eta_d')],
                  Source.TIMING: [('sigma_delta', 'rho_delta_fixed')]}.get(source, [])
        for alternatives in needed:
            if all(getattr(self, name) is None for name in alternatives):
                raise ConfigurationError(f"Source '{source.value}' needs {' or '.join(alternatives)} in the "
                                         f"noise specification")

    def replace(self, **changes):
        fields = self.to_dict(include_unset=True)
        fields.update(changes)
        return NoiseSpec(**fields)

    def to_dict(self, include_unset=False):
        fields = {name: value for name, value in self.__fields.items() if include_unset or value is not None}
        if include_unset or self.rho_delta_fixed is not None:
            fields['rho_delta_fixed'] = self.rho_delta_fixed
        fields['seed'] = self.seed
        fields['efficiency_squared'] = self.efficiency_squared
        return fields

    def __eq__(self, other):
        return isinstance(other, NoiseSpec) and self.to_dict(True) == other.to_dict(True)

    def __hash__(self):
        return hash(tuple(sorted(self.to_dict(True).items())))

    def __repr__(self):
        given = ', '.join(f"{name}={value}" for name, value in self.to_dict().items()
                          if name not in ('seed', 'efficiency_squared'))
        return ('\n'.join([f"<NoiseSpec: {given or 'noise-free'}",
                           f"Seed: {self.seed}",
                           f"Efficiency squared: {self.efficiency_squared}>"]))


class BudgetEntry:
    """
    Predicted SOC-error s.d. of each source at one or more sample indices, and their naive combination.

    Every field is a float or an array of the same shape. `timing_bias` is the deterministic w_delta term of a fixed
    timing coefficient; it shifts the error mean and is not part of `combined`.
    """

    def __init__(self, sigma_s_i, sigma_s_int, sigma_s_c, sigma_s_eta, sigma_s_delta, timing_bias=0.0):
        self.__terms = {}
        for name, value in zip(BUDGET_COLUMNS.values(), (sigma_s_i, sigma_s_int, sigma_s_c, sigma_s_eta,
                                                          sigma_s_delta)):
            self.__terms[name] = check_nonnegative(value, name)
        self.__timing_bias = timing_bias if np.ndim(timing_bias) else float(timing_bias)

    @property
    def sigma_s_i(self):
        return self.__terms['sigma_s_i']

    @property
    def sigma_s_int(self):
        return self.__terms['sigma_s_int']

    @property
    def sigma_s_c(self):
        return self.__terms['sigma_s_c']

    @property
    def sigma_s_eta(self):
        return self.__terms['sigma_s_eta']

    @property
    def sigma_s_delta(self):
        return self.__terms['sigma_s_delta']

    @property
    def timing_bias(self):
        return self.__timing_bias

    @property
    def variance(self):
        return sum(np.square(term) for term in self.__terms.values())

    @property
    def combined(self):
        combined = np.sqrt(self.variance)
        return float(combined) if np.ndim(combined) == 0 else combined

    def source(self, source):
        """The s.d. of a single source, `combined` for Source.COMBINED."""
        source = Source.parse(source)
        return self.combined if source is Source.COMBINED else self.__terms[BUDGET_COLUMNS[source.value]]

    def to_dict(self):
        out = dict(self.__terms)
        out['combined'] = self.combined
        out['timing_bias'] = self.timing_bias
        return out

    def __repr__(self):
        return ('\n'.join([f"<BudgetEntry: combined={self.combined}"] +
                          [f"{name}: {value}" for name, value in self.__terms.items()]) + '>')


class ErrorBudget:
    """
    Per-source and combined predicted SOC-error s.d. over every sample index k of a trace.
    """

    def __init__(self, entry, delta):
        """
        :param entry: [BudgetEntry] A budget whose fields are arrays over k = 1..n.
        :param delta: [float] The sample period in seconds.
        """
        if not isinstance(entry, BudgetEntry):
            raise TypeError("`entry` must be a BudgetEntry")
        columns = entry.to_dict()
        n = np.size(columns['combined'])
        frame = pd.DataFrame({'k': np.arange(1, n + 1), 't_s': np.arange(1, n + 1) * float(delta)})
        for name, values in columns.items():
            frame[name] = np.broadcast_to(np.asarray(values, dtype=float), (n,))
        self.__frame = frame
        self.__entry = entry

    @property
    def entry(self):
        return self.__entry

    @property
    def frame(self):
        return self.__frame.copy()

    @property
    def combined(self):
        return self.__frame['combined'].to_numpy()

    @property
    def classification(self):
        return {BUDGET_COLUMNS[source]: tag for source, tag in SOURCE_CLASSIFICATION.items()}

    def __getitem__(self, column):
        return self.__frame[column].to_numpy()

    def __len__(self):
        return len(self.__frame)

    def __repr__(self):
        return f"<ErrorBudget: {len(self)} samples, final combined s.d. {self.combined[-1] if len(self) else 0.0}>"
