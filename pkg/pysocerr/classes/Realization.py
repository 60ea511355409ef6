from .NoiseSpec import Source


class Realization:
    """
    Everything one Monte-Carlo run of an injector produced: the run's true profile, the current samples the counter
    saw, the clean samples at the true instants, the belief the counter used and the random draws behind them.
    """

    def __init__(self, source, run_index, profile, truth, belief, clean, measured, draws=None):
        """
        :param source: [Source] The injected error source.
        :param run_index: [int] Index of the Monte-Carlo run.
        :param profile: [SegmentProfile] The true current profile of this run.
        :param truth: [BatteryTruth] The true battery.
        :param belief: [BeliefParams] The (possibly perturbed) belief of the Coulomb counter.
        :param clean: [SampledCurrent] Noise-free samples at the true sampling instants.
        :param measured: [SampledCurrent] The samples handed to the Coulomb counter.
        :param draws: [dict] The random parameters drawn for this run, e.g. {'c_batt': 1.43}.
        """
        self.__source = Source.parse(source)
        self.__run_index = int(run_index)
        self.__profile = profile
        self.__truth = truth
        self.__belief = belief
        self.__clean = clean
        self.__measured = measured
        self.__draws = dict(draws or {})

    @property
    def source(self):
        return self.__source

    @property
    def run_index(self):
        return self.__run_index

    @property
    def profile(self):
        return self.__profile

    @property
    def truth(self):
        return self.__truth

    @property
    def belief(self):
        return self.__belief

    @property
    def clean(self):
        return self.__clean

    @property
    def measured(self):
        return self.__measured

    @property
    def draws(self):
        return dict(self.__draws)

    def __repr__(self):
        return ('\n'.join([f"<Realization: source={self.source.value}, run {self.run_index}",
                           f"Samples: {len(self.measured)} at believed {self.belief.delta} s",
                           f"Draws: {self.__draws}>"]))
