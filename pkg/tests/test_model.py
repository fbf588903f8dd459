import math

import numpy as np
import pytest

from fluidaoi import errors
from fluidaoi.model import (AgeFunction,
                            ClassSpec,
                            NetworkSpec,
                            rescale,
                            rescale_threshold,
                            round_threshold,
                            unscale,
                            unscale_threshold,
                            validate_network)


def test_class_spec_coerces_floats():
    c = ClassSpec(1, 1)
    assert c == (1.0, 1.0, None)
    assert not c.has_threshold
    assert c.with_threshold(2).threshold_rescaled == 2.0


def test_validate_network(two_class):
    spec = NetworkSpec(two_class, 100)
    assert validate_network(spec) is spec


def test_fraction_sum_mismatch():
    spec = NetworkSpec([ClassSpec(0.5, 0.9), ClassSpec(0.4, 0.2)], 10)
    with pytest.raises(errors.FractionSumMismatch) as excinfo:
        validate_network(spec)
    assert excinfo.value.data['class_index'] == 1


def test_non_integer_class_size(two_class):
    with pytest.raises(errors.NonIntegerClassSize):
        validate_network(NetworkSpec(two_class, 3))


@pytest.mark.parametrize('fraction,success_prob,threshold,field', [
    (0.0, 0.5, None, 'fraction'),
    (1.5, 0.5, None, 'fraction'),
    (1.0, 0.0, None, 'success_prob'),
    (1.0, 1.1, None, 'success_prob'),
    (1.0, 0.5, -1.0, 'threshold_rescaled'),
])
def test_out_of_range(fraction, success_prob, threshold, field):
    spec = NetworkSpec([ClassSpec(fraction, success_prob, threshold)], 10)
    with pytest.raises(errors.OutOfRangeParameter) as excinfo:
        validate_network(spec)
    assert excinfo.value.data == {'class_index': 0, 'field': field}


def test_num_agents_must_be_positive(two_class):
    with pytest.raises(errors.OutOfRangeParameter):
        validate_network(NetworkSpec(two_class, 0))


def test_class_of_agent(two_class):
    spec = NetworkSpec(two_class, 4)
    assert spec.class_sizes == (2, 2)
    assert spec.class_of_agent.tolist() == [0, 0, 1, 1]


def test_with_thresholds(two_class):
    spec = NetworkSpec(two_class, 4).with_thresholds([1.0, 2.0])
    assert [c.threshold_rescaled for c in spec.classes] == [1.0, 2.0]
    assert spec.unscaled_thresholds() == [4, 8]
    with pytest.raises(errors.OutOfRangeParameter):
        spec.with_thresholds([1.0])


def test_rescale_round_trip():
    for h in (0, 1, 7, 12345):
        for N in (1, 3, 1000):
            age = rescale(h, N)
            assert unscale(age) == h
            assert float(age) == h / float(N)


def test_rescale_arrays():
    ages = rescale(np.array([0, 5, 10]), 5)
    np.testing.assert_allclose(ages.value, [0.0, 1.0, 2.0])


def test_rescale_rejects_bad_n():
    with pytest.raises(errors.OutOfRangeParameter):
        rescale(1, 0)


def test_threshold_conversions():
    assert rescale_threshold(250, 100) == 2.5
    assert unscale_threshold(2.5, 100) == 250.0
    assert unscale(2.5, 100) == 250.0
    assert round_threshold(1.7341, 100) == 173
    assert round_threshold(0.005, 100) == 1
    assert round_threshold(0.0, 100) == 0


def test_age_function_values():
    h = np.array([0.0, 1.0, 3.0])
    assert AgeFunction.linear()(h).tolist() == [0.0, 1.0, 3.0]
    assert AgeFunction.power(2)(h).tolist() == [0.0, 1.0, 9.0]
    assert AgeFunction.log(1.0)(math.e - 1.0) == pytest.approx(1.0)


def test_age_function_validation():
    with pytest.raises(errors.OutOfRangeParameter):
        AgeFunction.power(0)
    with pytest.raises(errors.OutOfRangeParameter):
        AgeFunction.log(-1)
    with pytest.raises(errors.OutOfRangeParameter):
        AgeFunction('cubic')


def test_age_function_parse_and_label():
    V = AgeFunction.parse(' Power ', m='4', a='')
    assert V == AgeFunction.power(4)
    assert V.label == 'power(m=4)'
    assert AgeFunction.parse('log', a='0.5').label == 'log(a=0.5)'
    assert AgeFunction.parse('linear').label == 'linear'
