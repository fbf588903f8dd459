"""Scenario orchestration: simulation cells against fluid theory.

A scenario expands an ``ExperimentConfig`` into independent cells keyed by
(N, policy, seed), runs them inline or on a process pool, and folds the
results into CSV rows and a JSON payload. Cells are merged in key order, so
completion order never reaches the output files.
"""
from collections import namedtuple
from concurrent.futures import ProcessPoolExecutor
import functools
import logging
import os

import numpy as np

from ..config import Config
from ..errors import FluidAoiError, OutOfRangeParameter, PartialResults
from ..fluid.equilibrium import cdf_at, total_cdf
from ..fluid.thresholds import (lower_bound,
                                predicted_avg_aoi,
                                unscale_solution)
from ..logging_utils import JsonFileHandler
from ..sim.policies import PolicySpec
from ..sim.simulator import run
from .output import (CDF_HEADER,
                     KS_HEADER,
                     Manifest,
                     SUMMARY_HEADER,
                     write_csv,
                     write_json)
from .stats import class_ks_distance, ks_distance, mean_std, relative_gap

log = logging.getLogger(__name__)

GRID_POINTS = 101


class Cell(namedtuple('Cell', ['num_agents', 'policy', 'seed',
                               'sim_config'])):
    __slots__ = ()

    @property
    def key(self):
        return (self.num_agents, self.policy, self.seed)


CellResult = namedtuple('CellResult', ['key', 'status', 'result', 'error'])

ScenarioResult = namedtuple('ScenarioResult', [
    'scenario', 'cells', 'cdf_rows', 'ks_rows', 'summary_rows', 'payload'])


def run_cell(cell):
    """Run one cell; failures are captured, never raised."""
    extra = {'N': cell.num_agents, 'policy': cell.policy, 'seed': cell.seed}
    log.info("cell started", extra=extra)
    try:
        result = run(cell.sim_config)
    except FluidAoiError as e:
        log.error("cell failed: %s", e.message, extra=extra)
        return CellResult(cell.key, 'failed', None, e.tojson())
    except Exception as e:
        log.exception("cell crashed", extra=extra)
        return CellResult(cell.key, 'failed', None, {
            'name': e.__class__.__name__, 'message': str(e)})
    log.info("cell finished", extra=extra)
    return CellResult(cell.key, 'ok', result, None)


def run_cells(cells, workers=1):
    """Run cells in key order; results come back in the same order."""
    cells = sorted(cells, key=lambda c: c.key)
    if workers <= 1 or len(cells) <= 1:
        return [run_cell(c) for c in cells]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(run_cell, cells))


def _grouped(results):
    """{(N, policy): [SimResult, ...]} over successful cells."""
    groups = {}
    for r in results:
        if r.status == 'ok':
            groups.setdefault(r.key[:2], []).append(r.result)
    return groups


def _summary_row(scenario, N, policy, results, prediction, bound):
    aoi = mean_std([r.avg_aoi for r in results])
    agefn = mean_std([r.avg_agefn for r in results])
    return (scenario, N, policy, len(results), aoi[0], aoi[1],
            agefn[0], agefn[1], prediction, bound)


def _h_grid(eq):
    top = max(eq.thresholds) * 1.25
    if not eq.is_boundary:
        top += 5.0 * max(eq.tail_scale(c) for c in range(eq.num_classes))
    return np.linspace(0.0, top, GRID_POINTS)


def cdf_convergence(exp, runner):
    """Empirical against fluid CDFs at each snapshot slot, for every N.

    Empirical CDFs are averaged over replications; KS statistics are
    reported per seed, aggregated and per class.
    """
    name = 'cdf_convergence'
    solution = exp.solution()
    eq = exp.equilibrium(exp.num_agents, solution)
    grid = _h_grid(eq)

    cells = [Cell(N, exp.policy(N, solution).label, seed,
                  exp.sim_config(N, seed, exp.policy(N, solution), solution))
             for N in exp.n_sweep for seed in exp.seeds]
    results = runner(cells)

    cdf_rows, ks_rows, summary_rows = [], [], []
    ks_payload = []
    for r in results:
        if r.status != 'ok':
            continue
        N, policy, seed = r.key
        for snap in r.result.snapshots:
            stat = ks_distance(snap, eq)
            ks_rows.append((name, N, snap.slot, seed, 'all',
                            stat.statistic, stat.n_samples))
            per_class = []
            for c in range(eq.num_classes):
                cstat = class_ks_distance(snap, eq, c)
                per_class.append(cstat.statistic)
                ks_rows.append((name, N, snap.slot, seed, c + 1,
                                cstat.statistic, cstat.n_samples))
            ks_payload.append({'N': N, 'slot': snap.slot, 'seed': seed,
                               'ks': stat.statistic,
                               'class_ks': per_class})

    for (N, policy), runs in sorted(_grouped(results).items()):
        for k, slot in enumerate(exp.snapshot_slots):
            snaps = [r.snapshots[k] for r in runs]
            for c in range(eq.num_classes):
                empirical = np.mean([s.empirical_cdf(c, grid)
                                     for s in snaps], axis=0)
                theory = cdf_at(eq, c, grid)
                cdf_rows.extend((name, N, slot, c + 1, h, e, t)
                                for h, e, t in zip(grid, empirical, theory))
            empirical = np.mean([s.total_cdf(grid) for s in snaps], axis=0)
            theory = total_cdf(eq, grid)
            cdf_rows.extend((name, N, slot, 'all', h, e, t)
                            for h, e, t in zip(grid, empirical, theory))
        summary_rows.append(_summary_row(
            name, N, policy, runs, predicted_avg_aoi(exp.classes, N),
            lower_bound(exp.classes, N)))

    payload = {
        'scenario': name,
        'equilibrium': eq.serialize(),
        'ks': ks_payload,
    }
    return ScenarioResult(name, results, cdf_rows, ks_rows, summary_rows,
                          payload)


def _policy_comparison(name, exp, runner, solution, prediction, bound):
    """Threshold policy against the index policy for every N."""
    compare = PolicySpec.index(exp.index_exponent_compare)
    cells = []
    for N in exp.n_sweep:
        threshold = exp.threshold_policy(N, solution)
        for seed in exp.seeds:
            cells.append(Cell(N, threshold.label, seed,
                              exp.sim_config(N, seed, threshold, solution)))
            cells.append(Cell(N, compare.label, seed,
                              exp.sim_config(N, seed, compare, solution)))
    results = runner(cells)
    groups = _grouped(results)

    summary_rows, rows_payload = [], []
    for N in exp.n_sweep:
        means = {}
        for policy in sorted({c.policy for c in cells if c.num_agents == N}):
            runs = groups.get((N, policy))
            if not runs:
                continue
            row = _summary_row(name, N, policy, runs, prediction(N),
                               bound(N))
            summary_rows.append(row)
            means[policy] = row
        rows_payload.append(dict(
            N=N, **_gaps(means, 'threshold_random', compare.label,
                         prediction(N), exp.age_function.kind)))
    return results, summary_rows, rows_payload


def _gaps(means, threshold, index, prediction, kind):
    # AoI columns for linear, age-function columns otherwise
    column = 4 if kind == 'linear' else 6
    gaps = {}
    if threshold in means:
        value = means[threshold][column]
        gaps['threshold_vs_prediction'] = relative_gap(value, prediction)
        gaps['threshold_minus_prediction'] = value - prediction
        if index in means:
            gaps['threshold_vs_index'] = relative_gap(
                value, means[index][column])
    return gaps


def avg_aoi_vs_N(exp, runner):
    """Time-average AoI of threshold and index policies against theory."""
    name = 'avg_aoi_vs_N'
    solution = exp.solution()
    results, summary_rows, gaps = _policy_comparison(
        name, exp, runner, solution,
        lambda N: predicted_avg_aoi(exp.classes, N),
        lambda N: lower_bound(exp.classes, N))
    payload = {'scenario': name, 'gaps': gaps,
               'thresholds_rescaled': list(
                   exp.thresholds_rescaled(solution))}
    return ScenarioResult(name, results, [], [], summary_rows, payload)


def nonlinear_age(exp, runner):
    """Average V of tuned thresholds and the AoI index policy.

    The fluid optimum is on rescaled ages; with
    ``rescaled_age_function = false`` it is restated in slots where V is
    homogeneous.
    """
    name = 'nonlinear_age'
    solution = exp.solution()
    if solution is None:
        raise OutOfRangeParameter(
            "nonlinear_age needs derived thresholds", field='thresholds')

    def optimum(N):
        if exp.rescaled_age_function:
            return solution.optimum
        return unscale_solution(solution, N, exp.classes,
                                **exp.kkt_options).optimum

    results, summary_rows, gaps = _policy_comparison(
        name, exp, runner, solution, optimum, optimum)
    payload = {'scenario': name, 'gaps': gaps,
               'age_function': exp.age_function.label,
               'fluid_optimum': solution.optimum,
               'thresholds_rescaled': list(solution.thresholds)}
    return ScenarioResult(name, results, [], [], summary_rows, payload)


BUILTIN_SCENARIOS = {
    'cdf_convergence': cdf_convergence,
    'avg_aoi_vs_N': avg_aoi_vs_N,
    'nonlinear_age': nonlinear_age,
}


def _write_outputs(exp, result, output_dir):
    files = []
    prefix = os.path.join(output_dir, result.scenario)
    if 'csv' in exp.emit:
        if result.cdf_rows:
            files.append(write_csv(prefix + '_cdf.csv', CDF_HEADER,
                                   result.cdf_rows))
        if result.ks_rows:
            files.append(write_csv(prefix + '_ks.csv', KS_HEADER,
                                   result.ks_rows))
        files.append(write_csv(prefix + '_summary.csv', SUMMARY_HEADER,
                               result.summary_rows))
    if 'json' in exp.emit:
        payload = dict(result.payload)
        payload['summary'] = [dict(zip(SUMMARY_HEADER, row))
                              for row in result.summary_rows]
        files.append(write_json(prefix + '.json', payload))
    return files


def run_scenario(exp, config=None, output_dir=None, config_source=None):
    """Run the configured scenario and write its result files.

    :returns: the written ``Manifest``
    :raises PartialResults: some cells failed; everything else was written
    """
    if config is None:
        config = Config()
    output_dir = output_dir or exp.output_dir
    if not os.path.isdir(output_dir):
        os.makedirs(output_dir)

    # no timestamps: reruns reproduce run.log byte for byte
    handler = JsonFileHandler(os.path.join(output_dir, 'run.log'), mode='w',
                              timestamps=False)
    handler.setLevel(logging.INFO)
    package_log = logging.getLogger('fluidaoi')
    level = package_log.level
    if not package_log.isEnabledFor(logging.INFO):
        package_log.setLevel(logging.INFO)
    package_log.addHandler(handler)
    try:
        scenario = Config.scenario(exp.scenario)
        runner = functools.partial(run_cells, workers=config.workers)
        log.info("scenario %s started", exp.scenario,
                 extra={'scenario': exp.scenario})
        result = scenario(exp, runner)

        manifest = Manifest(exp.scenario, config_source)
        for r in result.cells:
            manifest.add(r.key, r.status, r.error)
        manifest.files = _write_outputs(exp, result, output_dir)
        manifest.write(output_dir)
    finally:
        package_log.setLevel(level)
        package_log.removeHandler(handler)
        handler.close()

    if not manifest.complete:
        log.error("%d of %d cells failed", len(manifest.failed),
                  len(manifest.cells))
        raise PartialResults(
            "{} of {} cells failed".format(len(manifest.failed),
                                           len(manifest.cells)),
            failed=[c['key'] for c in manifest.failed])
    return manifest
