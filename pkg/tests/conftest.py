import pytest

from fluidaoi import Config
from fluidaoi.fluid import equilibrium, thresholds_linear
from fluidaoi.model import ClassSpec, NetworkSpec
from fluidaoi.sim import PolicySpec, SimConfig

from .experiment_data import TWO_CLASS_INI


@pytest.fixture
def two_class():
    """The running example: eta = {0.5, 0.5}, p = {0.9, 0.2}."""
    return (ClassSpec(0.5, 0.9), ClassSpec(0.5, 0.2))


@pytest.fixture
def linear_classes(two_class):
    thresholds = thresholds_linear(two_class)
    return tuple(c.with_threshold(h) for c, h in zip(two_class, thresholds))


@pytest.fixture
def linear_eq(linear_classes):
    return equilibrium(linear_classes)


@pytest.fixture
def single_class():
    """C = 1, p = 1, zero threshold."""
    return (ClassSpec(1.0, 1.0, 0.0),)


def micro_config(num_agents, horizon=1000, policy=None, **kwargs):
    """p = 1, zero thresholds, all ages zero."""
    network = NetworkSpec([ClassSpec(1.0, 1.0, 0.0)], num_agents)
    if policy is None:
        policy = PolicySpec.threshold_random([0])
    return SimConfig(network, policy, horizon=horizon, **kwargs)


@pytest.fixture
def default_config():
    return Config()


@pytest.fixture
def experiment_file(tmpdir):
    path = tmpdir.join('experiment.ini')
    path.write(TWO_CLASS_INI.format(output_dir=tmpdir.join('out')))
    return str(path)


class MockPolicy(object):
    """Always schedules agent 0."""

    def __init__(self, spec, state):
        self.spec = spec

    def select(self, state):
        return 0

    def delivered(self, agent, state):
        pass


@pytest.fixture
def mock_policy():
    Config.register_policy("mock", MockPolicy)

    yield MockPolicy

    if "mock" in Config._valid_policy_hash:
        del Config._valid_policy_hash["mock"]


@pytest.fixture
def interior_eq(two_class):
    """Thresholds {1, 2}: well inside the existence region, beta ~ 0.41."""
    return equilibrium([c.with_threshold(h)
                        for c, h in zip(two_class, (1.0, 2.0))])
