"""Command line interface: ``fluidaoi <subcommand> ...``.

Exit codes are 0 on success, 2 for configuration errors, 3 for numerical
failures and 4 when a scenario finished with failed cells.
"""
from __future__ import print_function

import argparse
import json
import logging
import sys

from .config import Config
from .errors import FluidAoiError, OutOfRangeParameter
from .experiments import (emit_fluid_report,
                          load_config,
                          presets,
                          run_scenario)
from .experiments.output import write_json, write_transient
from .fluid import (equilibrium_initial_density,
                    gaussian_initial_density,
                    init_transient,
                    run_to)
from .fluid.transient import default_h_max
from .logging_utils import configure_logging
from .model import AgeFunction, ClassSpec
from .sim import PolicySpec, run

log = logging.getLogger('fluidaoi')


def _age_function(args):
    return AgeFunction.parse(args.age_function, m=args.m, a=args.a)


def _inline_classes(args):
    if len(args.fraction) != len(args.success_prob):
        raise OutOfRangeParameter(
            "--fraction and --success-prob need the same length",
            field='classes')
    return [ClassSpec(f, p) for f, p in zip(args.fraction, args.success_prob)]


def cmd_fluid(args, config):
    if args.experiment:
        exp = load_config(args.experiment, config)
        classes, age_function = exp.classes, exp.age_function
        num_agents = args.num_agents or exp.num_agents
        epsilon = exp.epsilon if args.epsilon is None else args.epsilon
    else:
        classes, age_function = _inline_classes(args), _age_function(args)
        num_agents = args.num_agents or 100
        epsilon = args.epsilon

    report = emit_fluid_report(classes, age_function, num_agents,
                               path=args.output, epsilon=epsilon,
                               beta_tolerance=config.beta_tolerance,
                               tolerance=config.kkt_tolerance,
                               max_iterations=config.max_iterations)
    if args.output is None:
        print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def cmd_simulate(args, config):
    exp = load_config(args.experiment, config)
    num_agents = args.num_agents or exp.num_agents
    seed = exp.seed if args.seed is None else args.seed
    solution = exp.solution()
    if args.policy is None:
        policy = exp.policy(num_agents, solution)
    elif args.policy == 'threshold_random':
        policy = exp.threshold_policy(num_agents, solution)
    else:
        policy = PolicySpec(args.policy, index_exponent=exp.index_exponent)

    result = run(exp.sim_config(num_agents, seed, policy, solution))
    payload = {
        'N': num_agents,
        'seed': seed,
        'policy': policy.label,
        'thresholds_unscaled': policy.thresholds_unscaled,
        'slots': result.slots,
        'avg_aoi': result.avg_aoi,
        'avg_agefn': result.avg_agefn,
        'class_avg_aoi': result.class_avg_aoi,
        'idle_slots': result.idle_slots,
        'deliveries': result.deliveries,
        'snapshots': [s.serialize() for s in result.snapshots]
        if args.snapshots else [s.slot for s in result.snapshots],
    }
    if args.output:
        write_json(args.output, payload)
    else:
        print(json.dumps(payload, indent=2, sort_keys=True,
                         default=lambda v: v.item()))
    return 0


def cmd_transient(args, config):
    exp = load_config(args.experiment, config)
    network = exp.network(exp.num_agents)
    eq = exp.equilibrium(exp.num_agents)

    grid_step = args.grid_step or config.grid_step
    h_max = default_h_max(network.classes, config.tail_factor)
    if args.initial == 'equilibrium':
        initial = equilibrium_initial_density(eq)
    else:
        initial = gaussian_initial_density(network.classes,
                                           exp.num_agents)

    state = init_transient(network.classes, initial, grid_step=grid_step,
                           h_max=h_max)
    final = run_to(state, args.t_end, dt=args.dt, reference=eq,
                   record_every=args.record_every)
    paths = write_transient(args.output_dir, final, every=args.every)

    print(json.dumps({
        't_end': final.time,
        'sup_distance': final.sup_distance(eq),
        'mass': final.mass(),
        'files': paths,
    }, indent=2, sort_keys=True))
    return 0


def cmd_experiment(args, config):
    exp = load_config(args.experiment, config)
    manifest = run_scenario(exp, config, output_dir=args.output_dir,
                            config_source=args.experiment)
    print(json.dumps(manifest.serialize(), indent=2, sort_keys=True))
    return 0


def cmd_presets(args, config):
    for name in presets():
        exp = load_config(name, config)
        print("{:<12} {:<16} {}".format(name, exp.scenario, exp.description))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog='fluidaoi',
        description='Fluid limits and simulation of AoI scheduling')
    parser.add_argument('--ini', help='fluidaoi.ini to use instead of the '
                        'standard search path')
    parser.add_argument('--log-level', help='override [default] log_level')
    parser.add_argument('--workers', type=int,
                        help='override [default] workers')
    sub = parser.add_subparsers(dest='command')
    sub.required = True

    fluid = sub.add_parser('fluid', help='equilibrium and thresholds report')
    fluid.add_argument('experiment', nargs='?',
                       help='experiment ini file or preset name')
    fluid.add_argument('--fraction', type=float, nargs='+', default=[])
    fluid.add_argument('--success-prob', type=float, nargs='+', default=[])
    fluid.add_argument('--age-function', default='linear',
                       choices=AgeFunction.KINDS)
    fluid.add_argument('-m', type=float)
    fluid.add_argument('-a', type=float)
    fluid.add_argument('-N', '--num-agents', type=int)
    fluid.add_argument('--epsilon', type=float)
    fluid.add_argument('-o', '--output')
    fluid.set_defaults(func=cmd_fluid)

    simulate = sub.add_parser('simulate', help='single simulation run')
    simulate.add_argument('experiment')
    simulate.add_argument('-N', '--num-agents', type=int)
    simulate.add_argument('--seed', type=int)
    simulate.add_argument('--policy')
    simulate.add_argument('--snapshots', action='store_true',
                          help='include snapshot ages in the output')
    simulate.add_argument('-o', '--output')
    simulate.set_defaults(func=cmd_simulate)

    transient = sub.add_parser('transient', help='transient fluid PDE run')
    transient.add_argument('experiment')
    transient.add_argument('--t-end', type=float, default=20.0)
    transient.add_argument('--grid-step', type=float)
    transient.add_argument('--dt', type=float)
    transient.add_argument('--initial', choices=('gaussian', 'equilibrium'),
                           default='gaussian')
    transient.add_argument('--record-every', type=float, default=1.0)
    transient.add_argument('--every', type=int, default=10,
                           help='write every k-th grid cell')
    transient.add_argument('--output-dir', default='results/transient')
    transient.set_defaults(func=cmd_transient)

    experiment = sub.add_parser('experiment', help='run a scenario')
    experiment.add_argument('experiment',
                            help='experiment ini file or preset name')
    experiment.add_argument('--output-dir')
    experiment.set_defaults(func=cmd_experiment)

    listing = sub.add_parser('presets', help='list packaged presets')
    listing.set_defaults(func=cmd_presets)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = Config(args.ini)
        if args.log_level:
            config.config.set('default', 'log_level', args.log_level.upper())
        if args.workers:
            config.config.set('default', 'workers', str(args.workers))
        configure_logging(config)
        if args.command == 'fluid' and not args.experiment and \
           not args.fraction:
            raise OutOfRangeParameter(
                "give an experiment file or --fraction/--success-prob",
                field='classes')
        return args.func(args, config)
    except FluidAoiError as e:
        log.error("%s", e.tojson()['message'], extra={'data': e.data})
        return e.exit_code
    except Exception:
        log.exception("unexpected failure")
        return 1


if __name__ == '__main__':
    sys.exit(main())
