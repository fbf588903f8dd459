"""CSV and JSON emission for experiment results.

Every numeric cell is checked for finiteness before anything is written.
Files contain no timestamps, so reruns of one config produce identical
bytes.
"""
import csv
import json
import logging
import math
import os

import numpy as np
import six

from ..errors import NumericalError
from ..fluid.equilibrium import BETA_TOLERANCE, equilibrium
from ..fluid.thresholds import (lower_bound,
                                optimal_thresholds,
                                predicted_avg_aoi,
                                unscale_solution)
from ..model import NetworkSpec

log = logging.getLogger(__name__)

CDF_HEADER = ('scenario', 'N', 'slot', 'class', 'h_rescaled',
              'empirical_cdf', 'theory_cdf')
SUMMARY_HEADER = ('scenario', 'N', 'policy', 'seed_count', 'avg_aoi_mean',
                  'avg_aoi_std', 'avg_agefn_mean', 'avg_agefn_std',
                  'fluid_prediction', 'lower_bound')
KS_HEADER = ('scenario', 'N', 'slot', 'seed', 'class', 'ks_statistic',
             'n_samples')
DENSITY_HEADER = ('class', 'h', 'density', 'time')
TRACE_HEADER = ('time', 'sup_distance', 'mass')


def _check_finite(value, where):
    if isinstance(value, float) and not math.isfinite(value):
        raise NumericalError("non-finite value in {}".format(where),
                             value=repr(value))
    return value


def _plain(value, where='output'):
    """Convert numpy scalars and containers into JSON-ready values."""
    if isinstance(value, dict):
        return dict((k, _plain(v, where)) for k, v in six.iteritems(value))
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v, where) for v in value]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return _check_finite(float(value), where)
    return value


def write_csv(path, header, rows):
    rows = [tuple(_plain(v, path) for v in row) for row in rows]
    with open(path, 'w') as fh:
        writer = csv.writer(fh, lineterminator='\n')
        writer.writerow(header)
        writer.writerows(rows)
    log.info("wrote %d rows to %s", len(rows), path)
    return path


def write_json(path, payload):
    with open(path, 'w') as fh:
        json.dump(_plain(payload, path), fh, indent=2, sort_keys=True)
        fh.write('\n')
    log.info("wrote %s", path)
    return path


def fluid_report(classes, age_function, num_agents, epsilon=None,
                 beta_tolerance=BETA_TOLERANCE, **kwargs):
    """Thresholds, equilibrium and optima for one class structure.

    Thresholds are reported rescaled, unscaled for ``num_agents`` and
    rounded to slots. ``predicted_avg_aoi`` and ``lower_bound`` are the
    AoI figures in slots; ``optimum`` is the fluid optimum of V on rescaled
    ages. ``kwargs`` reach the log stationarity solver.
    """
    if isinstance(classes, NetworkSpec):
        classes = classes.classes
    solution = optimal_thresholds(classes, age_function, epsilon=epsilon,
                                  **kwargs)
    unscaled = unscale_solution(solution, num_agents, classes, **kwargs)
    eq = equilibrium([c.with_threshold(h)
                      for c, h in zip(classes, solution.thresholds)],
                     tolerance=beta_tolerance)

    report = {
        'age_function': age_function.label,
        'num_agents': num_agents,
        'thresholds_rescaled': list(solution.thresholds),
        'thresholds_unscaled': list(unscaled.thresholds),
        'thresholds_rounded': list(unscaled.rounded),
        'beta': eq.beta,
        'kappas': list(eq.kappas),
        'boundary_equilibrium': eq.is_boundary,
        'optimum': solution.optimum,
        'optimum_unscaled': unscaled.optimum,
        'predicted_avg_aoi': predicted_avg_aoi(classes, num_agents),
        'lower_bound': lower_bound(classes, num_agents),
    }
    if solution.kkt is not None:
        report['kkt'] = {
            'xs': list(solution.kkt.xs),
            'lambda': solution.kkt.lam,
            'stationarity_residual': solution.kkt.residuals[0],
            'constraint_residual': solution.kkt.residuals[1],
        }
    return _plain(report, 'fluid report')


def emit_fluid_report(classes, age_function, num_agents, path=None,
                      **kwargs):
    """Build ``fluid_report`` and write it as JSON when ``path`` is set."""
    report = fluid_report(classes, age_function, num_agents, **kwargs)
    if path is not None:
        write_json(path, report)
    return report


def write_transient(output_dir, solution, every=1):
    """Density snapshot and distance trace of a transient run."""
    if not os.path.isdir(output_dir):
        os.makedirs(output_dir)
    paths = [write_csv(os.path.join(output_dir, 'transient_density.csv'),
                       DENSITY_HEADER, solution.to_rows(every))]
    if solution.trace:
        paths.append(write_csv(
            os.path.join(output_dir, 'transient_trace.csv'),
            TRACE_HEADER, solution.trace))
    return paths


class Manifest(object):
    """Status of every scenario cell, written as manifest.json."""

    def __init__(self, scenario, config_source=None):
        self.scenario = scenario
        self.config_source = config_source
        self.cells = []
        self.files = []

    def add(self, key, status, error=None):
        cell = {'key': list(key), 'status': status}
        if error is not None:
            cell['error'] = error
        self.cells.append(cell)

    @property
    def failed(self):
        return [c for c in self.cells if c['status'] != 'ok']

    @property
    def complete(self):
        return not self.failed

    def serialize(self):
        return {
            'scenario': self.scenario,
            'config': self.config_source,
            'complete': self.complete,
            'cells': self.cells,
            'files': sorted(os.path.basename(f) for f in self.files),
        }

    def write(self, output_dir):
        return write_json(os.path.join(output_dir, 'manifest.json'),
                          self.serialize())
