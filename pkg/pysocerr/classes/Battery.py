import numpy as np

from ..exceptions import InvalidInputError
from ..helpers import check_positive


def _check_efficiency(value, name, allow_overunity=False):
    value = check_positive(value, name)
    if value > 1 and not allow_overunity:
        raise InvalidInputError(f"`{name}` must lie in (0, 1], got {value}")
    return value


class BatteryTruth:
    """
    The ground-truth battery: what the simulator integrates against, never what the Coulomb counter assumes.

    Attributes:
        - c_true: [float] True capacity in ampere-hours.
        - eta_c_true: [float] True charging efficiency.
        - eta_d_true: [float] True discharging efficiency.
        - delta_true: [float] True sample period of the current sensor in seconds.
    """

    def __init__(self, c_true, eta_c_true=1.0, eta_d_true=1.0, delta_true=1.0):
        self.__c_true = check_positive(c_true, 'c_true')
        self.__eta_c_true = _check_efficiency(eta_c_true, 'eta_c_true')
        self.__eta_d_true = _check_efficiency(eta_d_true, 'eta_d_true')
        self.__delta_true = check_positive(delta_true, 'delta_true')

    @property
    def c_true(self):
        return self.__c_true

    @property
    def eta_c_true(self):
        return self.__eta_c_true

    @property
    def eta_d_true(self):
        return self.__eta_d_true

    @property
    def delta_true(self):
        return self.__delta_true

    def with_delta(self, delta_true):
        return BatteryTruth(self.c_true, self.eta_c_true, self.eta_d_true, delta_true)

    def to_dict(self):
        return {'c_true': self.c_true, 'eta_c_true': self.eta_c_true, 'eta_d_true': self.eta_d_true,
                'delta_true': self.delta_true}

    def __eq__(self, other):
        return isinstance(other, BatteryTruth) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(tuple(self.to_dict().items()))

    def __repr__(self):
        return ('\n'.join([f"<BatteryTruth: C_true={self.c_true} Ah",
                           f"Efficiencies: charge={self.eta_c_true}, discharge={self.eta_d_true}",
                           f"Sample period: {self.delta_true} s>"]))


class BeliefParams:
    """
    The parameters a Coulomb counter believes in: assumed capacity, efficiencies and sample period.

    Efficiencies are validated to (0, 1]. Beliefs produced by the error injectors perturb an efficiency around its
    true value and may exceed one; those are built with `allow_overunity=True`.
    """

    def __init__(self, c_batt, eta_c=1.0, eta_d=1.0, delta=1.0, allow_overunity=False):
        """
        :param c_batt: [float] Assumed capacity in ampere-hours.
        :param eta_c: [float] Assumed charging efficiency.
        :param eta_d: [float] Assumed discharging efficiency.
        :param delta: [float] Assumed sample period in seconds.
        :param allow_overunity: [bool] Accept efficiencies above one (perturbed beliefs only).
        """
        self.__c_batt = check_positive(c_batt, 'c_batt')
        self.__eta_c = _check_efficiency(eta_c, 'eta_c', allow_overunity)
        self.__eta_d = _check_efficiency(eta_d, 'eta_d', allow_overunity)
        self.__delta = check_positive(delta, 'delta')
        self.__allow_overunity = bool(allow_overunity)

    @classmethod
    def from_truth(cls, truth):
        """A belief that matches `truth` exactly: the error-free Coulomb counter."""
        return cls(truth.c_true, truth.eta_c_true, truth.eta_d_true, truth.delta_true)

    @property
    def c_batt(self):
        return self.__c_batt

    @property
    def eta_c(self):
        return self.__eta_c

    @property
    def eta_d(self):
        return self.__eta_d

    @property
    def delta(self):
        return self.__delta

    def replace(self, **changes):
        """Return a copy with some fields changed; over-unity efficiencies are allowed on the copy."""
        fields = self.to_dict()
        fields.update(changes)
        fields.setdefault('allow_overunity', True)
        return BeliefParams(**fields)

    def efficiency(self, current):
        """
        Efficiency applied to a sample: `eta_c` when charging, `eta_d` when discharging. A zero sample gets
        `eta_c`; its Coulomb term vanishes either way.
        """
        return self.eta_d if current < 0 else self.eta_c

    def efficiencies(self, currents):
        return np.where(np.asarray(currents, dtype=float) < 0, self.eta_d, self.eta_c)

    def to_dict(self):
        fields = {'c_batt': self.c_batt, 'eta_c': self.eta_c, 'eta_d': self.eta_d, 'delta': self.delta}
        if self.__allow_overunity:
            fields['allow_overunity'] = True
        return fields

    def __eq__(self, other):
        return isinstance(other, BeliefParams) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(tuple(self.to_dict().items()))

    def __repr__(self):
        return ('\n'.join([f"<BeliefParams: C_batt={self.c_batt} Ah",
                           f"Efficiencies: charge={self.eta_c}, discharge={self.eta_d}",
                           f"Sample period: {self.delta} s>"]))
