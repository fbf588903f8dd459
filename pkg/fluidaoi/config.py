import logging
import os
import sys

import pkg_resources

from six.moves import configparser

from .errors import OutOfRangeParameter, ParseError


DEFAULTS = {
    'default': {
        'log_level': 'WARNING',
        'workers': '1',
    },
    'fluid': {
        'epsilon_factor': '1e-3',
        'beta_tolerance': '1e-12',
        'kkt_tolerance': '1e-10',
        'max_iterations': '200',
    },
    'transient': {
        'grid_step': '1e-3',
        'tail_factor': '20',
    },
    'simulation': {
        'reset_to_one': 'false',
        'rescaled_age_function': 'true',
        'replications': '5',
    },
}


def get_config(path=None):
    conf = configparser.ConfigParser()
    conf.read_dict(DEFAULTS)
    paths = [
        "/etc/fluidaoi.ini",
        "/usr/etc/fluidaoi.ini",
        "/usr/local/etc/fluidaoi.ini",
        os.path.join(sys.prefix, "etc/fluidaoi.ini"),
        "~/.fluidaoi.ini",
        os.path.join(os.getcwd(), ".fluidaoi.ini"),
        "${FLUIDAOI_INI}"]

    if path is not None:
        try:
            with open(path, 'r') as fh:
                conf.read_file(fh)
        except IOError:
            raise ParseError("Could not read configuration file {}".format(
                path), path=path)
        except configparser.Error as e:
            raise ParseError(str(e), path=path)
    else:
        for p in paths:
            try:
                with open(os.path.expanduser(
                        os.path.expandvars(p)), 'r') as fh:
                    conf.read_file(fh)
            except IOError:
                pass
            except configparser.Error as e:
                raise ParseError(str(e), path=p)

    return conf


class Config(object):
    _valid_policy_hash = {}
    _valid_scenario_hash = {}

    @classmethod
    def register_policy(cls, name, policy):
        cls._valid_policy_hash[name] = policy

    @classmethod
    def register_scenario(cls, name, scenario):
        cls._valid_scenario_hash[name] = scenario

    @classmethod
    def policy_class(cls, name):
        _load_builtins()
        try:
            return cls._valid_policy_hash[name]
        except KeyError:
            raise OutOfRangeParameter(
                "{} is not a valid policy".format(name), field='kind')

    @classmethod
    def scenario(cls, name):
        _load_builtins()
        try:
            return cls._valid_scenario_hash[name]
        except KeyError:
            raise OutOfRangeParameter(
                "{} is not a valid scenario".format(name), field='scenario')

    @classmethod
    def policies(cls):
        _load_builtins()
        return sorted(cls._valid_policy_hash)

    @classmethod
    def scenarios(cls):
        _load_builtins()
        return sorted(cls._valid_scenario_hash)

    def __init__(self, path=None):
        self.config = get_config(path)

    def _get(self, section, option, convert):
        try:
            return convert(self.config.get(section, option))
        except ValueError:
            raise ParseError(
                "[{}] {} = {!r} is not valid".format(
                    section, option, self.config.get(section, option)),
                section=section, field=option)

    def _getboolean(self, section, option):
        try:
            return self.config.getboolean(section, option)
        except ValueError:
            raise ParseError(
                "[{}] {} is not a boolean".format(section, option),
                section=section, field=option)

    @property
    def log_level(self):
        try:
            return getattr(logging, self.config.get("default", "log_level"))
        except (AttributeError, configparser.NoOptionError):
            return logging.WARNING

    @property
    def log_file(self):
        try:
            return self.config.get("default", "log_file") or None
        except configparser.NoOptionError:
            return None

    @property
    def workers(self):
        return max(self._get("default", "workers", int), 1)

    @property
    def epsilon_factor(self):
        return self._get("fluid", "epsilon_factor", float)

    @property
    def beta_tolerance(self):
        return self._get("fluid", "beta_tolerance", float)

    @property
    def kkt_tolerance(self):
        return self._get("fluid", "kkt_tolerance", float)

    @property
    def max_iterations(self):
        return self._get("fluid", "max_iterations", int)

    @property
    def grid_step(self):
        return self._get("transient", "grid_step", float)

    @property
    def tail_factor(self):
        return self._get("transient", "tail_factor", float)

    @property
    def reset_to_one(self):
        return self._getboolean("simulation", "reset_to_one")

    @property
    def rescaled_age_function(self):
        return self._getboolean("simulation", "rescaled_age_function")

    @property
    def replications(self):
        return self._get("simulation", "replications", int)


_builtins_loaded = []


def _load_builtins():
    if _builtins_loaded:
        return
    _builtins_loaded.append(True)

    from .experiments.scenarios import BUILTIN_SCENARIOS
    from .sim.policies import BUILTIN_POLICIES

    for name, policy in BUILTIN_POLICIES.items():
        Config._valid_policy_hash.setdefault(name, policy)
    for name, scenario in BUILTIN_SCENARIOS.items():
        Config._valid_scenario_hash.setdefault(name, scenario)


for ep in pkg_resources.iter_entry_points(group='fluidaoi.policies'):
    Config.register_policy(ep.name, ep.load())

for ep in pkg_resources.iter_entry_points(group='fluidaoi.scenarios'):
    Config.register_scenario(ep.name, ep.load())
