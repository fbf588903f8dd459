import pytest

from fluidaoi import errors
from fluidaoi.model import ClassSpec, NetworkSpec
from fluidaoi.sim import (IndexPolicy,
                          policy_select,
                          PolicySpec,
                          SimConfig,
                          Simulator,
                          ThresholdRandom,
                          WhittlePolicy)

from .conftest import micro_config


def _two_class_sim(ages, policy, seed=0):
    network = NetworkSpec([ClassSpec(0.5, 0.9, 0.0), ClassSpec(0.5, 0.2, 0.0)],
                          2)
    return Simulator(SimConfig(network, policy, horizon=10, seed=seed,
                               initial_ages=ages))


def test_spec_labels():
    assert PolicySpec.threshold_random([1, 2]).label == 'threshold_random'
    assert PolicySpec.index().label == 'index(e=2)'
    assert PolicySpec.index(2.0).label == 'index(e=3)'
    assert PolicySpec.index(2.0).weight_exponent == 3.0
    assert PolicySpec('whittle').label == 'whittle'


def test_spec_from_rescaled():
    spec = PolicySpec.from_rescaled([1.7341, 3.6786], 100)
    assert spec.thresholds_unscaled == (173, 368)
    assert spec.kind == 'threshold_random'


@pytest.mark.parametrize('spec', [
    PolicySpec('threshold_random'),
    PolicySpec.threshold_random([1]),
    PolicySpec.threshold_random([1, -1]),
    PolicySpec.index(0.5),
    PolicySpec.index(float('inf')),
])
def test_spec_validation(spec):
    with pytest.raises(errors.OutOfRangeParameter):
        spec.validate(2)


def test_threshold_idles_until_age_exceeds_threshold():
    sim = Simulator(micro_config(1))
    assert isinstance(sim.policy, ThresholdRandom)
    # age 0 is not above a zero threshold
    assert policy_select(sim.state, sim.policy) is None
    sim.step_slot()
    assert sim.state.age(0) == 1
    assert policy_select(sim.state, sim.policy) == 0


@pytest.mark.parametrize('seed', range(10))
def test_threshold_picks_only_eligible(seed):
    network = NetworkSpec([ClassSpec(1.0, 1.0, 0.0)], 4)
    sim = Simulator(SimConfig(network, PolicySpec.threshold_random([2]),
                              horizon=10, seed=seed,
                              initial_ages=(0, 1, 3, 5)))
    assert sim.policy.select(sim.state) in (2, 3)


def test_threshold_eligible_pool_after_delivery():
    network = NetworkSpec([ClassSpec(1.0, 1.0, 0.0)], 3)
    sim = Simulator(SimConfig(network, PolicySpec.threshold_random([1]),
                              horizon=10, initial_ages=(4, 4, 0)))
    sim.step_slot()
    delivered = [i for i in range(3) if sim.state.age(i) == 0]
    assert len(delivered) == 1
    assert sim.policy.eligible == [1 - delivered[0]]
    assert sorted(sim.policy.pending[0]) == sorted([2, delivered[0]])


def test_threshold_per_class_thresholds():
    network = NetworkSpec([ClassSpec(0.5, 1.0, 0.0), ClassSpec(0.5, 1.0, 0.0)],
                          2)
    sim = Simulator(SimConfig(network, PolicySpec.threshold_random([10, 2]),
                              horizon=10, initial_ages=(5, 5)))
    assert sim.policy.select(sim.state) == 1


def test_index_picks_oldest():
    network = NetworkSpec([ClassSpec(1.0, 1.0, 0.0)], 2)
    sim = Simulator(SimConfig(network, PolicySpec.index(), horizon=10,
                              initial_ages=(3, 2)))
    assert isinstance(sim.policy, IndexPolicy)
    assert policy_select(sim.state, sim.policy) == 0


def test_index_weighs_success_probability():
    sim = _two_class_sim((3, 5), PolicySpec.index())
    # 0.9 * 9 > 0.2 * 25
    assert sim.policy.weight(0, 3) == pytest.approx(8.1)
    assert sim.policy.select(sim.state) == 0
    sim = _two_class_sim((3, 7), PolicySpec.index())
    assert sim.policy.select(sim.state) == 1


def test_index_exponent():
    # 0.9 * 3 ** 3 = 24.3 < 0.2 * 5 ** 3 = 25
    sim = _two_class_sim((3, 5), PolicySpec.index(2.0))
    assert sim.policy.select(sim.state) == 1


def test_whittle_weight():
    sim = _two_class_sim((3, 5), PolicySpec('whittle'))
    assert isinstance(sim.policy, WhittlePolicy)
    assert sim.policy.weight(0, 3) == \
        pytest.approx(0.9 * 3 * (3 + 2 / 0.9 - 1) / 2)
    assert sim.policy.weight(1, 5) == pytest.approx(7.0)
    assert sim.policy.select(sim.state) == 1


def test_index_idles_when_all_ages_zero():
    sim = Simulator(micro_config(3, policy=PolicySpec.index()))
    assert sim.policy.select(sim.state) is None


@pytest.mark.parametrize('seed', range(20))
def test_index_breaks_ties_within_head_group(seed):
    network = NetworkSpec([ClassSpec(1.0, 1.0, 0.0)], 3)
    sim = Simulator(SimConfig(network, PolicySpec.index(), horizon=10,
                              seed=seed, initial_ages=(4, 4, 1)))
    assert sim.policy.select(sim.state) in (0, 1)


def test_index_tie_breaking_reaches_every_agent():
    network = NetworkSpec([ClassSpec(1.0, 1.0, 0.0)], 2)
    chosen = set()
    for seed in range(50):
        sim = Simulator(SimConfig(network, PolicySpec.index(), horizon=10,
                                  seed=seed, initial_ages=(4, 4)))
        chosen.add(sim.policy.select(sim.state))
    assert chosen == {0, 1}


def test_index_groups_follow_deliveries():
    network = NetworkSpec([ClassSpec(1.0, 1.0, 0.0)], 3)
    sim = Simulator(SimConfig(network, PolicySpec.index(), horizon=10,
                              initial_ages=(5, 3, 1)))
    for expected in (0, 1, 2):
        assert sim.policy.select(sim.state) == expected
        sim.step_slot()
        assert sim.state.age(expected) == 0


def test_plugin_policy(mock_policy):
    sim = Simulator(micro_config(2, policy=PolicySpec('mock')))
    assert isinstance(sim.policy, mock_policy)
    assert policy_select(sim.state, sim.policy) == 0


def test_unknown_policy():
    with pytest.raises(errors.OutOfRangeParameter):
        Simulator(micro_config(2, policy=PolicySpec('nope')))
