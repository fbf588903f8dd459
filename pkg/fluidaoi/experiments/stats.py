from collections import namedtuple

import numpy as np
import scipy.stats

from ..errors import ClassMismatch
from ..fluid.equilibrium import cdf_at, total_cdf

CLASS_TOLERANCE = 1e-9

KsResult = namedtuple('KsResult', ['statistic', 'n_samples'])


def _check_classes(snapshot, eq):
    if snapshot.num_classes != eq.num_classes:
        raise ClassMismatch(
            "snapshot has {} classes, equilibrium {}".format(
                snapshot.num_classes, eq.num_classes))
    for c, (ages, spec) in enumerate(zip(snapshot.class_ages, eq.classes)):
        share = len(ages) / float(snapshot.num_agents)
        if abs(share - spec.fraction) > CLASS_TOLERANCE:
            raise ClassMismatch(
                "class {} holds {!r} of the agents, expected {!r}".format(
                    c, share, spec.fraction),
                class_index=c)


def ks_distance(snapshot, eq):
    """Sup distance between the aggregated empirical and fluid CDFs.

    Both sides of every jump of the empirical CDF are compared with the
    continuous theory CDF.

    :raises ClassMismatch: class counts or fractions differ
    """
    _check_classes(snapshot, eq)
    ages = snapshot.all_ages
    result = scipy.stats.kstest(ages, lambda h: total_cdf(eq, h),
                                method='asymp')
    return KsResult(float(result.statistic), len(ages))


def class_ks_distance(snapshot, eq, c):
    """KS distance for one class, both CDFs normalized by all N agents."""
    _check_classes(snapshot, eq)
    ages = snapshot.class_ages[c]
    if len(ages) == 0:
        return KsResult(0.0, 0)

    N = float(snapshot.num_agents)
    theory = cdf_at(eq, c, ages)
    steps = np.arange(1, len(ages) + 1) / N
    above = np.max(steps - theory)
    below = np.max(theory - (steps - 1.0 / N))
    return KsResult(float(max(above, below, 0.0)), len(ages))


def mean_std(values):
    """Mean and sample standard deviation; the deviation of one value is 0."""
    values = np.asarray(values, dtype=float)
    mean = float(np.mean(values))
    if len(values) < 2:
        return mean, 0.0
    return mean, float(np.std(values, ddof=1))


def relative_gap(value, reference):
    return (value - reference) / float(reference)
