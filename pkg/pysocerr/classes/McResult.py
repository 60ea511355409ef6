import numpy as np
import pandas as pd

from ..exceptions import InvalidInputError
from .NoiseSpec import Source


class McResult:
    """
    Empirical against predicted SOC-error s.d. of one Monte-Carlo experiment.

    Attributes:
        - source: [Source] The injected error source.
        - runs: [int] Number of Monte-Carlo runs M (>= 2).
        - empirical_sd: [ndarray] sqrt(mean over runs of (s_true(k) - s_m(k))^2), k = 1..n.
        - theoretical_sd: [ndarray] The matching closed-form prediction.
        - max_rel_dev: [float or None] max over k >= k_min of |empirical - theoretical| / theoretical; None when the
            theoretical curve is zero throughout.
        - k_min: [int] First (zero-based) index the relative deviation is evaluated at.
        - seed: [int] Experiment seed.
        - tolerance: [float] Acceptance tolerance on `max_rel_dev`.
        - mean_error: [ndarray] Mean over runs of (s_m(k) - s_true(k)).
        - diagnostics: [dict] Source-specific extras (exact capacity factor, fitted kappa, ...).
    """

    def __init__(self, source, runs, empirical_sd, theoretical_sd, delta, seed, k_min, max_rel_dev, tolerance,
                 mean_error=None, diagnostics=None):
        empirical_sd = np.asarray(empirical_sd, dtype=float)
        theoretical_sd = np.asarray(theoretical_sd, dtype=float)
        if empirical_sd.shape != theoretical_sd.shape:
            raise InvalidInputError(f"Empirical ({empirical_sd.size}) and theoretical ({theoretical_sd.size}) "
                                    f"curves differ in length")
        if np.any(empirical_sd < 0):
            raise InvalidInputError("Empirical s.d. must be non-negative")
        if runs < 2:
            raise InvalidInputError(f"A Monte-Carlo experiment needs at least 2 runs, got {runs}")
        self.__source = Source.parse(source)
        self.__runs = int(runs)
        self.__empirical_sd = empirical_sd
        self.__theoretical_sd = theoretical_sd
        self.__delta = float(delta)
        self.__seed = int(seed)
        self.__k_min = int(k_min)
        self.__max_rel_dev = None if max_rel_dev is None else float(max_rel_dev)
        self.__tolerance = float(tolerance)
        self.__mean_error = np.zeros_like(empirical_sd) if mean_error is None else np.asarray(mean_error, float)
        self.__diagnostics = dict(diagnostics or {})

    @property
    def source(self):
        return self.__source

    @property
    def runs(self):
        return self.__runs

    @property
    def empirical_sd(self):
        return self.__empirical_sd

    @property
    def theoretical_sd(self):
        return self.__theoretical_sd

    @property
    def delta(self):
        return self.__delta

    @property
    def seed(self):
        return self.__seed

    @property
    def k_min(self):
        return self.__k_min

    @property
    def max_rel_dev(self):
        return self.__max_rel_dev

    @property
    def tolerance(self):
        return self.__tolerance

    @property
    def mean_error(self):
        return self.__mean_error

    @property
    def diagnostics(self):
        return dict(self.__diagnostics)

    @property
    def passed(self):
        """True when the curves agree within `tolerance`, or when there is nothing to compare."""
        return self.max_rel_dev is None or self.max_rel_dev <= self.tolerance

    def to_frame(self):
        k = np.arange(1, self.__empirical_sd.size + 1)
        return pd.DataFrame({'k': k, 't_s': k * self.__delta, 'empirical_sd': self.__empirical_sd,
                             'theoretical_sd': self.__theoretical_sd})

    def to_dict(self):
        return {'source': self.source.value, 'runs': self.runs, 'seed': self.seed, 'delta': self.delta,
                'k_min': self.k_min, 'max_rel_dev': self.max_rel_dev, 'tolerance': self.tolerance,
                'passed': self.passed, 'diagnostics': self.diagnostics}

    def __len__(self):
        return self.__empirical_sd.size

    def __repr__(self):
        return ('\n'.join([f"<McResult: source={self.source.value}, M={self.runs}, seed={self.seed}",
                           f"Samples: {len(self)} (relative deviation from k={self.k_min})",
                           f"Max relative deviation: {self.max_rel_dev} (tolerance {self.tolerance})>"]))
