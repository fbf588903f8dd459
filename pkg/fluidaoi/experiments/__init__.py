from .loader import (ExperimentConfig,
                     load_config,
                     load_string,
                     preset_path,
                     presets)
from .output import emit_fluid_report, fluid_report, Manifest
from .scenarios import (avg_aoi_vs_N,
                        cdf_convergence,
                        nonlinear_age,
                        run_cells,
                        run_scenario)
from .stats import class_ks_distance, ks_distance, KsResult

__all__ = ('avg_aoi_vs_N', 'cdf_convergence', 'class_ks_distance',
           'emit_fluid_report', 'ExperimentConfig', 'fluid_report',
           'ks_distance', 'KsResult', 'load_config', 'load_string',
           'Manifest', 'nonlinear_age', 'preset_path', 'presets',
           'run_cells', 'run_scenario')
