"""Experiment configuration files.

An experiment file is an ini file with one ``[class:<k>]`` section per
class plus ``[network]``, ``[policy]``, ``[age_function]``, ``[simulation]``
and ``[experiment]`` sections. ``preset = <name>`` under ``[experiment]``
loads a packaged preset first and overlays the file's own keys.
"""
from collections import namedtuple
import logging
import os
import re

import pkg_resources
import six
from six.moves import configparser

from ..config import Config
from ..errors import OutOfRangeParameter, ParseError
from ..fluid.equilibrium import equilibrium
from ..fluid.thresholds import default_epsilon, optimal_thresholds
from ..model import (AgeFunction,
                     ClassSpec,
                     NetworkSpec,
                     rescale_threshold,
                     round_threshold,
                     validate_network)
from ..sim.policies import PolicySpec
from ..sim.simulator import DEFAULT_HORIZON, SimConfig, validate_sim_config

log = logging.getLogger(__name__)

EMIT_KINDS = ('csv', 'json')
THRESHOLD_SOURCES = ('explicit', 'linear', 'power', 'log')
_CLASS_SECTION = re.compile(r'^class:(\d+)$')


def presets():
    """Names of the packaged presets."""
    return sorted(os.path.splitext(name)[0] for name in
                  pkg_resources.resource_listdir(__name__, 'presets')
                  if name.endswith('.ini'))


def preset_path(name):
    if name not in presets():
        raise OutOfRangeParameter(
            "{} is not a known preset".format(name), field='preset')
    return pkg_resources.resource_filename(
        __name__, 'presets/{}.ini'.format(name))


class ExperimentConfig(namedtuple('ExperimentConfig', [
        'scenario', 'preset', 'description', 'classes', 'num_agents',
        'policy_kind', 'index_exponent', 'thresholds_source',
        'explicit_thresholds', 'epsilon', 'age_function', 'horizon', 'seed',
        'burn_in', 'snapshot_slots', 'initial_ages', 'reset_to_one',
        'rescaled_age_function', 'n_sweep', 'replications', 'output_dir',
        'emit', 'index_exponent_compare', 'beta_tolerance', 'kkt_tolerance',
        'max_iterations'])):
    """A validated experiment description with defaults applied.

    The solver settings come from the [fluid] section of fluidaoi.ini.
    """
    __slots__ = ()

    @property
    def kkt_options(self):
        return {'tolerance': self.kkt_tolerance,
                'max_iterations': self.max_iterations}

    def solution(self):
        """Rescaled threshold solution, None for explicit thresholds."""
        if self.thresholds_source == 'explicit':
            return None
        if self.thresholds_source == 'linear':
            return optimal_thresholds(self.classes, AgeFunction.linear(),
                                      epsilon=self.epsilon)
        return optimal_thresholds(self.classes, self.age_function,
                                  **self.kkt_options)

    def thresholds_rescaled(self, solution=None):
        if self.thresholds_source == 'explicit':
            return tuple(rescale_threshold(h, self.num_agents)
                         for h in self.explicit_thresholds)
        solution = solution or self.solution()
        return solution.thresholds

    def network(self, num_agents, solution=None):
        thresholds = self.thresholds_rescaled(solution)
        return NetworkSpec(
            [c.with_threshold(h) for c, h in zip(self.classes, thresholds)],
            num_agents)

    def equilibrium(self, num_agents, solution=None):
        return equilibrium(self.network(num_agents, solution).classes,
                           tolerance=self.beta_tolerance,
                           max_iterations=self.max_iterations)

    def threshold_policy(self, num_agents, solution=None):
        if self.thresholds_source == 'explicit' and \
           num_agents == self.num_agents:
            return PolicySpec.threshold_random(self.explicit_thresholds)
        return PolicySpec.threshold_random(
            [round_threshold(h, num_agents)
             for h in self.thresholds_rescaled(solution)])

    def policy(self, num_agents, solution=None):
        if self.policy_kind == 'threshold_random':
            return self.threshold_policy(num_agents, solution)
        thresholds = self.threshold_policy(
            num_agents, solution).thresholds_unscaled
        return PolicySpec(self.policy_kind, thresholds, self.index_exponent)

    def sim_config(self, num_agents, seed, policy, solution=None):
        return SimConfig(
            self.network(num_agents, solution), policy,
            horizon=self.horizon, seed=seed,
            snapshot_slots=self.snapshot_slots,
            age_function=self.age_function,
            initial_ages=self.initial_ages, burn_in=self.burn_in,
            reset_to_one=self.reset_to_one,
            rescaled_age_function=self.rescaled_age_function)

    @property
    def seeds(self):
        return tuple(self.seed + k for k in range(self.replications))


def _read(parser, path):
    try:
        with open(path, 'r') as fh:
            parser.read_file(fh)
    except IOError:
        raise ParseError("Could not read {}".format(path), path=path)
    except configparser.MissingSectionHeaderError as e:
        raise ParseError("{}, line {}: missing section header".format(
            path, e.lineno), path=path, line=e.lineno)
    except configparser.ParsingError as e:
        lineno, line = e.errors[0]
        raise ParseError("{}, line {}: cannot parse {}".format(
            path, lineno, line.strip()), path=path, line=lineno)
    except configparser.Error as e:
        raise ParseError("{}: {}".format(path, e), path=path)


class _Reader(object):
    """Typed access to one parsed experiment file."""

    def __init__(self, parser):
        self.parser = parser

    def get(self, section, option, convert=str, default=None):
        if not self.parser.has_option(section, option):
            return default
        raw = self.parser.get(section, option).strip()
        if raw == '':
            return default
        try:
            return convert(raw)
        except ValueError:
            raise ParseError(
                "[{}] {} = {!r} is not valid".format(section, option, raw),
                section=section, field=option)

    def getlist(self, section, option, convert, default=()):
        return self.get(
            section, option,
            lambda raw: tuple(convert(v) for v in re.split(r'[,\s]+', raw)
                              if v),
            default)

    def getboolean(self, section, option, default):
        if not self.parser.has_option(section, option):
            return default
        try:
            return self.parser.getboolean(section, option)
        except ValueError:
            raise ParseError(
                "[{}] {} is not a boolean".format(section, option),
                section=section, field=option)


def _integer(raw):
    value = float(raw)
    if not value.is_integer():
        raise ValueError(raw)
    return int(value)


def _classes(reader):
    sections = []
    for section in reader.parser.sections():
        match = _CLASS_SECTION.match(section)
        if match:
            sections.append((int(match.group(1)), section))
    if not sections:
        raise ParseError("no [class:<k>] sections", field='classes')

    classes, thresholds = [], []
    for _, section in sorted(sections):
        fraction = reader.get(section, 'fraction', float)
        success_prob = reader.get(section, 'success_prob', float)
        if fraction is None or success_prob is None:
            raise ParseError(
                "[{}] needs fraction and success_prob".format(section),
                section=section)
        classes.append(ClassSpec(fraction, success_prob))
        thresholds.append(reader.get(section, 'threshold', _integer))
    return tuple(classes), thresholds


def _parse(parser, config):
    reader = _Reader(parser)
    classes, explicit = _classes(reader)

    num_agents = reader.get('network', 'num_agents', _integer)
    if num_agents is None:
        raise ParseError("[network] num_agents is required",
                         section='network', field='num_agents')

    age_function = AgeFunction.parse(
        reader.get('age_function', 'kind', default='linear'),
        m=reader.get('age_function', 'm', float),
        a=reader.get('age_function', 'a', float))

    source = reader.get('policy', 'thresholds', default=age_function.kind)
    scenario = reader.get('experiment', 'scenario',
                          default='avg_aoi_vs_N')
    default_replications = 1 if scenario == 'cdf_convergence' \
        else config.replications

    epsilon = reader.get('policy', 'epsilon', float)
    if epsilon is None:
        epsilon = default_epsilon(classes, config.epsilon_factor)

    initial_ages = reader.get('simulation', 'initial_ages', default='zero')
    if initial_ages == 'explicit':
        initial_ages = reader.getlist('simulation', 'explicit_ages', _integer)

    return ExperimentConfig(
        scenario=scenario,
        preset=reader.get('experiment', 'preset'),
        description=reader.get('experiment', 'description', default=''),
        classes=classes,
        num_agents=num_agents,
        policy_kind=reader.get('policy', 'kind',
                               default='threshold_random'),
        index_exponent=reader.get('policy', 'index_exponent', float, 1.0),
        thresholds_source=source,
        explicit_thresholds=tuple(explicit)
        if source == 'explicit' else None,
        epsilon=epsilon,
        age_function=age_function,
        horizon=reader.get('simulation', 'horizon', _integer,
                           DEFAULT_HORIZON),
        seed=reader.get('simulation', 'seed', _integer, 0),
        burn_in=reader.get('simulation', 'burn_in', _integer, 0),
        snapshot_slots=reader.getlist('simulation', 'snapshot_slots',
                                      _integer),
        initial_ages=initial_ages,
        reset_to_one=reader.getboolean('simulation', 'reset_to_one',
                                       config.reset_to_one),
        rescaled_age_function=reader.getboolean(
            'simulation', 'rescaled_age_function',
            config.rescaled_age_function),
        n_sweep=reader.getlist('experiment', 'n_sweep', _integer,
                               (num_agents,)),
        replications=reader.get('experiment', 'replications', _integer,
                                default_replications),
        output_dir=reader.get('experiment', 'output_dir',
                              default='results'),
        emit=reader.getlist('experiment', 'emit', str, EMIT_KINDS),
        index_exponent_compare=reader.get(
            'experiment', 'index_exponent_compare', float, 1.0),
        beta_tolerance=config.beta_tolerance,
        kkt_tolerance=config.kkt_tolerance,
        max_iterations=config.max_iterations)


def validate_experiment(exp):
    """Check everything the scenarios rely on before any run starts."""
    if exp.scenario not in Config.scenarios():
        raise OutOfRangeParameter(
            "{} is not a valid scenario".format(exp.scenario),
            field='scenario')
    if exp.policy_kind not in Config.policies():
        raise OutOfRangeParameter(
            "{} is not a valid policy".format(exp.policy_kind),
            field='kind')
    if exp.thresholds_source not in THRESHOLD_SOURCES:
        raise OutOfRangeParameter(
            "unknown thresholds source '{}'".format(exp.thresholds_source),
            field='thresholds')
    if exp.thresholds_source in ('power', 'log') and \
       exp.age_function.kind != exp.thresholds_source:
        raise OutOfRangeParameter(
            "{} thresholds need a {} age function".format(
                exp.thresholds_source, exp.thresholds_source),
            field='thresholds')
    if exp.thresholds_source == 'explicit':
        for i, h in enumerate(exp.explicit_thresholds):
            if h is None:
                raise OutOfRangeParameter(
                    "class {} has no explicit threshold".format(i),
                    class_index=i, field='threshold')

    validate_network(NetworkSpec(exp.classes, exp.num_agents))
    if not exp.n_sweep:
        raise OutOfRangeParameter("n_sweep is empty", field='n_sweep')

    if exp.replications < 1:
        raise OutOfRangeParameter("replications must be >= 1",
                                  field='replications')
    for kind in exp.emit:
        if kind not in EMIT_KINDS:
            raise OutOfRangeParameter(
                "cannot emit '{}'".format(kind), field='emit')

    for n in exp.n_sweep:
        validate_sim_config(SimConfig(
            NetworkSpec(exp.classes, n), PolicySpec.index(exp.index_exponent),
            horizon=exp.horizon, seed=exp.seed,
            snapshot_slots=exp.snapshot_slots,
            initial_ages=exp.initial_ages, burn_in=exp.burn_in))
    return exp


def load_config(path, config=None):
    """Parse, apply defaults to and validate an experiment file.

    ``path`` may also be the name of a packaged preset.

    :raises ParseError: unreadable file, bad syntax or a malformed value
    :raises ValidationError: parameters out of range
    """
    if config is None:
        config = Config()

    if not os.path.exists(path) and path in presets():
        path = preset_path(path)

    user = configparser.ConfigParser()
    _read(user, path)

    parser = configparser.ConfigParser()
    preset = user.get('experiment', 'preset', fallback=None)
    if preset:
        _read(parser, preset_path(preset.strip()))
    for section in user.sections():
        if not parser.has_section(section):
            parser.add_section(section)
        for option, value in user.items(section):
            parser.set(section, option, value)

    exp = _parse(parser, config)
    log.debug("loaded experiment %s from %s", exp.scenario, path)
    return validate_experiment(exp)


def load_string(text, config=None):
    """``load_config`` for an in-memory ini string."""
    parser = configparser.ConfigParser()
    try:
        parser.read_string(six.text_type(text))
    except configparser.Error as e:
        raise ParseError(str(e))
    return validate_experiment(_parse(parser, config or Config()))
