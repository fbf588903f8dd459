from .occupancy import empirical_cdf, OccupancySnapshot
from .policies import (IndexPolicy,
                       Policy,
                       policy_select,
                       PolicySpec,
                       ThresholdRandom,
                       WhittlePolicy)
from .simulator import (make_streams,
                        RandomStream,
                        run,
                        SimConfig,
                        SimResult,
                        SimState,
                        Simulator,
                        step_slot)

__all__ = ('empirical_cdf', 'IndexPolicy', 'make_streams',
           'OccupancySnapshot', 'Policy', 'policy_select', 'PolicySpec',
           'RandomStream', 'run', 'SimConfig', 'SimResult', 'SimState',
           'Simulator', 'step_slot', 'ThresholdRandom', 'WhittlePolicy')
