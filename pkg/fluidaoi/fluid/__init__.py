from .equilibrium import (cdf_at,
                          density_at,
                          equilibrium,
                          existence_sum,
                          FluidEquilibrium,
                          mean_age_value,
                          mean_aoi_class,
                          moment,
                          nu,
                          solve_beta,
                          tail_probability,
                          total_cdf)
from .thresholds import (lower_bound,
                         optimal_thresholds,
                         predicted_avg_aoi,
                         solve_log_kkt,
                         ThresholdSolution,
                         thresholds_linear,
                         thresholds_log,
                         thresholds_power,
                         unscale_solution)
from .transient import (equilibrium_initial_density,
                        gaussian_initial_density,
                        init_transient,
                        run_to,
                        step_pde,
                        TransientSolution)

__all__ = ('cdf_at', 'density_at', 'equilibrium',
           'equilibrium_initial_density', 'existence_sum',
           'FluidEquilibrium', 'gaussian_initial_density', 'init_transient',
           'lower_bound', 'mean_age_value', 'mean_aoi_class', 'moment', 'nu',
           'optimal_thresholds', 'predicted_avg_aoi', 'run_to',
           'solve_beta', 'solve_log_kkt', 'step_pde', 'tail_probability',
           'ThresholdSolution', 'thresholds_linear', 'thresholds_log',
           'thresholds_power', 'total_cdf', 'TransientSolution',
           'unscale_solution')
