import math

import numpy as np
import pytest
from scipy import integrate

from fluidaoi import errors
from fluidaoi.fluid import (cdf_at,
                            density_at,
                            equilibrium,
                            existence_sum,
                            mean_age_value,
                            mean_aoi_class,
                            moment,
                            nu,
                            solve_beta,
                            tail_probability,
                            thresholds_power,
                            total_cdf)
from fluidaoi.fluid.thresholds import log_optimum, solve_log_kkt
from fluidaoi.model import AgeFunction, ClassSpec

from .equilibrium_data import random_instances

INSTANCES = random_instances(1000)


def test_random_instances_root():
    for classes in INSTANCES:
        beta = solve_beta(classes)
        assert 0.0 < beta <= 1.0
        assert abs(nu(beta, classes)) <= 1e-12


@pytest.mark.parametrize('threshold,success_prob', [
    (0.1, 1.0), (0.5, 0.9), (1.0, 0.5), (3.0, 0.2), (0.0, 0.7)])
def test_single_class_closed_form(threshold, success_prob):
    classes = [ClassSpec(1.0, success_prob, threshold)]
    beta = solve_beta(classes)
    assert beta == pytest.approx(1.0 - threshold * success_prob, abs=1e-12)


def test_random_instances_normalization():
    for classes in INSTANCES[:200]:
        eq = equilibrium(classes)
        total = sum(cdf_at(eq, c, np.inf) for c in range(eq.num_classes))
        assert total == pytest.approx(1.0, abs=1e-8)
        below = sum(cdf_at(eq, c, cls.threshold_rescaled)
                    for c, cls in enumerate(classes))
        assert below == pytest.approx(1.0 - eq.beta, abs=1e-9)


def test_density_integrates_to_cdf(interior_eq):
    for c, cls in enumerate(interior_eq.classes):
        H = cls.threshold_rescaled
        for h in (0.5 * H, H, H + 0.01, H + 1.0):
            value, _ = integrate.quad(
                lambda x: density_at(interior_eq, c, x), 0.0, h,
                points=[H] if h > H else None, epsabs=1e-13)
            assert cdf_at(interior_eq, c, h) == \
                pytest.approx(value, abs=1e-9)


def test_density_is_flat_then_exponential(linear_eq):
    kappa = linear_eq.kappas[1]
    H = linear_eq.classes[1].threshold_rescaled
    assert density_at(linear_eq, 1, 0.0) == kappa
    assert density_at(linear_eq, 1, H) == kappa
    scale = linear_eq.tail_scale(1)
    assert density_at(linear_eq, 1, H + scale) == \
        pytest.approx(kappa / math.e)


def test_density_vectorized(linear_eq):
    h = np.linspace(0.0, 5.0, 11)
    values = density_at(linear_eq, 0, h)
    assert values.shape == (11,)
    assert isinstance(density_at(linear_eq, 0, 1.0), float)


def test_exponential_single_class(single_class):
    eq = equilibrium(single_class)
    assert eq.beta == 1.0
    assert eq.kappas == (1.0,)
    assert cdf_at(eq, 0, 1.0) == pytest.approx(1.0 - math.exp(-1.0))
    assert total_cdf(eq, 2.0) == pytest.approx(1.0 - math.exp(-2.0))
    assert tail_probability(eq, 0, 2.0) == pytest.approx(math.exp(-2.0))
    assert mean_aoi_class(eq, 0) == pytest.approx(1.0)


def _split_quad(f, threshold):
    flat, _ = integrate.quad(f, 0.0, threshold, epsabs=1e-14)
    tail, _ = integrate.quad(f, threshold, np.inf, epsabs=1e-14, limit=400)
    return flat + tail


def test_mean_aoi_class_matches_quadrature(interior_eq):
    for c, cls in enumerate(interior_eq.classes):
        value = _split_quad(
            lambda h: tail_probability(interior_eq, c, h),
            cls.threshold_rescaled)
        assert mean_aoi_class(interior_eq, c) == \
            pytest.approx(value, rel=1e-8)


def test_linear_mean_is_near_lower_bound(two_class, linear_eq):
    S = sum(c.fraction / math.sqrt(c.success_prob) for c in two_class)
    mean = mean_age_value(linear_eq, AgeFunction.linear())
    assert mean == pytest.approx(S ** 2 / 2.0, rel=1e-2)
    assert mean >= S ** 2 / 2.0


@pytest.mark.parametrize('V', [AgeFunction.power(2), AgeFunction.power(2.5),
                               AgeFunction.power(4), AgeFunction.log(1.0),
                               AgeFunction.log(10.0)])
def test_mean_age_value_matches_quadrature(interior_eq, V):
    total = 0.0
    for c, cls in enumerate(interior_eq.classes):
        total += _split_quad(
            lambda h: float(V(h)) * density_at(interior_eq, c, h),
            cls.threshold_rescaled)
    assert mean_age_value(interior_eq, V) == pytest.approx(total, rel=1e-7)


def test_moment(linear_eq):
    assert moment(linear_eq, 1) == pytest.approx(
        mean_age_value(linear_eq, AgeFunction.linear()), rel=1e-12)
    assert moment(linear_eq, 3) == pytest.approx(
        mean_age_value(linear_eq, AgeFunction.power(3)), rel=1e-12)


def test_existence_sum():
    classes = [ClassSpec(0.5, 0.5, 1.0), ClassSpec(0.5, 1.0, 0.5)]
    assert existence_sum(classes) == pytest.approx(2.0)
    assert existence_sum([ClassSpec(1.0, 1.0, 0.0)]) == float('inf')


def test_no_equilibrium():
    classes = [ClassSpec(1.0, 1.0, 2.0)]
    with pytest.raises(errors.NoEquilibrium):
        solve_beta(classes)
    with pytest.raises(errors.NoEquilibrium) as excinfo:
        equilibrium(classes)
    assert excinfo.value.data['existence_sum'] == pytest.approx(0.5)


def test_threshold_required():
    with pytest.raises(errors.OutOfRangeParameter):
        equilibrium([ClassSpec(1.0, 1.0)])


def test_boundary_equilibrium_for_power_thresholds(two_class):
    solution = thresholds_power(two_class, 4)
    classes = [c.with_threshold(h)
               for c, h in zip(two_class, solution.thresholds)]
    with pytest.raises(errors.NoEquilibrium):
        solve_beta(classes)

    eq = equilibrium(classes)
    assert eq.is_boundary
    assert eq.beta == 0.0
    for c, cls in enumerate(classes):
        H = cls.threshold_rescaled
        assert eq.kappas[c] == pytest.approx(cls.fraction / H)
        assert cdf_at(eq, c, H) == pytest.approx(cls.fraction)
        assert density_at(eq, c, H + 1e-9) == 0.0
    assert mean_age_value(eq, AgeFunction.power(4)) == \
        pytest.approx(solution.optimum, rel=1e-10)


def test_boundary_equilibrium_for_log_thresholds(two_class):
    kkt = solve_log_kkt(two_class, 1.0)
    classes = [c.with_threshold(h)
               for c, h in zip(two_class, kkt.thresholds)]
    eq = equilibrium(classes)
    assert eq.is_boundary
    assert mean_age_value(eq, AgeFunction.log(1.0)) == \
        pytest.approx(log_optimum(two_class, kkt.xs), rel=1e-10)


def test_serialize(linear_eq):
    payload = linear_eq.serialize()
    assert payload['beta'] == linear_eq.beta
    assert len(payload['kappas']) == 2
    assert len(payload['thresholds_rescaled']) == 2
