import numpy as np
import pytest

from fluidaoi import errors
from fluidaoi.experiments import class_ks_distance, ks_distance
from fluidaoi.experiments.stats import mean_std, relative_gap
from fluidaoi.fluid import equilibrium
from fluidaoi.sim import OccupancySnapshot


def _snapshot(ages, classes):
    return OccupancySnapshot.from_ages(0, np.asarray(ages, dtype=float),
                                       np.asarray(classes), max(classes) + 1)


def test_single_sample_at_zero(single_class):
    eq = equilibrium(single_class)
    snapshot = _snapshot([0], [0])
    assert ks_distance(snapshot, eq).statistic == pytest.approx(1.0)
    assert ks_distance(snapshot, eq).n_samples == 1
    assert class_ks_distance(snapshot, eq, 0).statistic == \
        pytest.approx(1.0)


def test_single_class_agrees_with_aggregate(single_class):
    eq = equilibrium(single_class)
    snapshot = _snapshot([0, 1, 2, 3], [0, 0, 0, 0])
    assert class_ks_distance(snapshot, eq, 0).statistic == \
        pytest.approx(ks_distance(snapshot, eq).statistic)


def test_sample_from_equilibrium(single_class):
    eq = equilibrium(single_class)
    N = 2000
    rng = np.random.Generator(np.random.Philox(3))
    snapshot = _snapshot(rng.exponential(size=N) * N, [0] * N)
    assert ks_distance(snapshot, eq).statistic < 0.05
    assert class_ks_distance(snapshot, eq, 0).statistic < 0.05


def test_class_distance_is_normalized_by_all_agents(two_class):
    eq = equilibrium([c.with_threshold(1.0) for c in two_class])
    snapshot = _snapshot([0, 0, 0, 0], [0, 0, 1, 1])
    # every class-0 agent at h = 0: the empirical CDF jumps straight to 1/2
    assert class_ks_distance(snapshot, eq, 0).statistic == \
        pytest.approx(0.5)
    assert class_ks_distance(snapshot, eq, 1).n_samples == 2


def test_class_count_mismatch(single_class, two_class):
    eq = equilibrium(single_class)
    with pytest.raises(errors.ClassMismatch):
        ks_distance(_snapshot([0, 1], [0, 1]), eq)


def test_class_fraction_mismatch(two_class):
    eq = equilibrium([c.with_threshold(1.0) for c in two_class])
    snapshot = _snapshot([0, 1, 2, 3], [0, 1, 1, 1])
    with pytest.raises(errors.ClassMismatch) as excinfo:
        class_ks_distance(snapshot, eq, 0)
    assert excinfo.value.data['class_index'] == 0


def test_mean_std():
    assert mean_std([1.0, 2.0, 3.0]) == (2.0, 1.0)
    assert mean_std([5.0]) == (5.0, 0.0)


def test_relative_gap():
    assert relative_gap(110.0, 100.0) == pytest.approx(0.1)
    assert relative_gap(90.0, 100.0) == pytest.approx(-0.1)
