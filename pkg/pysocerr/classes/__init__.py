from .Battery import BatteryTruth, BeliefParams
from .SocTrace import SocTrace, CcDecomposition
from .SegmentProfile import SegmentProfile, SampledCurrent, LoadStats
from .NoiseSpec import NoiseSpec, BudgetEntry, ErrorBudget, Source
from .Realization import Realization
from .McResult import McResult
from .FilterState import FilterState, MeasurementModel, TrackResult
from .RunConfig import RunConfig
