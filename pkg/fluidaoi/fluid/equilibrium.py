"""Stationary fluid limit of the threshold policy.

In equilibrium every class c has a flat density kappa_c on [0, H_c] and an
exponential tail kappa_c * exp(-p_c (h - H_c) / beta) above its threshold,
where beta is the total fraction of agents above threshold and the unique
positive root of ``nu``.
"""
from collections import namedtuple
import logging
import math

import numpy as np
from scipy import integrate, optimize, special

from ..errors import NoConvergence, NoEquilibrium, OutOfRangeParameter
from ..model import AgeFunction, NetworkSpec, validate_classes

log = logging.getLogger(__name__)

BETA_TOLERANCE = 1e-12
BOUNDARY_TOLERANCE = 1e-9
MAX_ITERATIONS = 200
QUAD_EPSREL = 1e-10


def _class_list(classes):
    if isinstance(classes, NetworkSpec):
        classes = classes.classes
    classes = tuple(classes)
    for i, c in enumerate(classes):
        if not c.has_threshold:
            raise OutOfRangeParameter(
                "class {} has no threshold".format(i),
                class_index=i, field='threshold_rescaled')
    return classes


def nu(beta, classes):
    """Residual of the fixed-point equation for beta.

    beta + sum_c eta_c H_c p_c / (beta + H_c p_c) - 1, where classes with a
    zero threshold contribute nothing.
    """
    total = beta - 1.0
    for c in _class_list(classes):
        hp = c.threshold_rescaled * c.success_prob
        if hp > 0.0:
            total += c.fraction * hp / (beta + hp)
    return total


def existence_sum(classes):
    """sum_c eta_c / (H_c p_c); infinite when any threshold is zero."""
    total = 0.0
    for c in _class_list(classes):
        hp = c.threshold_rescaled * c.success_prob
        if hp == 0.0:
            return float('inf')
        total += c.fraction / hp
    return total


def solve_beta(classes, tolerance=BETA_TOLERANCE,
               max_iterations=MAX_ITERATIONS):
    """Unique positive root of ``nu`` on (0, 1].

    :raises NoEquilibrium: thresholds too large for a positive root
    :raises NoConvergence: the residual misses ``tolerance``
    """
    classes = _class_list(classes)
    condition = existence_sum(classes)
    if condition <= 1.0 + 1e-12:
        raise NoEquilibrium(
            "sum eta/(H p) = {!r} <= 1".format(condition),
            existence_sum=condition)

    def _nu(beta):
        return nu(beta, classes)

    if _nu(1.0) == 0.0:
        return 1.0

    lo = 1e-3
    for _ in range(max_iterations):
        if _nu(lo) < 0.0:
            break
        lo /= 10.0
    else:
        raise NoConvergence(
            "could not bracket beta from below", lower=lo)

    assert _nu(1.0) > 0.0, "nu(1) must be nonnegative"

    beta = optimize.bisect(_nu, lo, 1.0, xtol=1e-300,
                           rtol=4 * np.finfo(float).eps,
                           maxiter=max_iterations)
    residual = abs(_nu(beta))
    log.debug("beta=%r bracket=[%r, 1] residual=%r", beta, lo, residual)

    if residual > tolerance:
        raise NoConvergence(
            "beta residual {!r} above {!r}".format(residual, tolerance),
            beta=beta, residual=residual)
    return beta


class FluidEquilibrium(namedtuple('FluidEquilibrium',
                                  ['beta', 'kappas', 'classes'])):
    __slots__ = ()

    @property
    def num_classes(self):
        return len(self.classes)

    @property
    def thresholds(self):
        return tuple(c.threshold_rescaled for c in self.classes)

    @property
    def is_boundary(self):
        """True for the beta -> 0 limit with no mass above threshold."""
        return self.beta == 0.0

    def tail_scale(self, c):
        """Decay length beta / p_c of the exponential tail."""
        return self.beta / self.classes[c].success_prob

    def serialize(self):
        return {
            'beta': self.beta,
            'kappas': list(self.kappas),
            'thresholds_rescaled': list(self.thresholds),
        }


def equilibrium(classes, boundary_tolerance=BOUNDARY_TOLERANCE, **kwargs):
    """Solve the stationary fluid limit for thresholded classes.

    Thresholds sitting on the existence boundary (sum eta/(H p) = 1 within
    ``boundary_tolerance``) give the beta -> 0 limit: kappa_c = eta_c / H_c
    and no tail.
    """
    classes = _class_list(classes)
    validate_classes(classes)

    condition = existence_sum(classes)
    if condition <= 1.0 + 1e-12:
        if condition < 1.0 - boundary_tolerance:
            raise NoEquilibrium(
                "sum eta/(H p) = {!r} < 1".format(condition),
                existence_sum=condition)
        log.debug("boundary equilibrium, existence sum %r", condition)
        kappas = tuple(c.fraction / c.threshold_rescaled for c in classes)
        return FluidEquilibrium(0.0, kappas, classes)

    beta = solve_beta(classes, **kwargs)
    kappas = tuple(
        c.fraction * c.success_prob /
        (beta + c.threshold_rescaled * c.success_prob)
        for c in classes)
    return FluidEquilibrium(beta, kappas, classes)


def _as_output(h, values):
    if np.ndim(h) == 0:
        return float(values)
    return values


def density_at(eq, c, h):
    """Equilibrium density of class ``c`` at rescaled age ``h``."""
    h_arr = np.asarray(h, dtype=float)
    kappa = eq.kappas[c]
    threshold = eq.classes[c].threshold_rescaled
    excess = np.maximum(h_arr - threshold, 0.0)

    if eq.is_boundary:
        values = np.where(h_arr <= threshold, kappa, 0.0)
    else:
        values = kappa * np.exp(-excess / eq.tail_scale(c))
    return _as_output(h, values)


def cdf_at(eq, c, h):
    """Closed-form integral of ``density_at`` over [0, h]."""
    h_arr = np.asarray(h, dtype=float)
    kappa = eq.kappas[c]
    threshold = eq.classes[c].threshold_rescaled
    flat = kappa * np.minimum(h_arr, threshold)

    if eq.is_boundary:
        values = flat
    else:
        scale = eq.tail_scale(c)
        excess = np.maximum(h_arr - threshold, 0.0)
        values = flat - kappa * scale * np.expm1(-excess / scale)
    return _as_output(h, values)


def total_cdf(eq, h):
    """Aggregated equilibrium CDF over all classes."""
    return sum(cdf_at(eq, c, h) for c in range(eq.num_classes))


def tail_probability(eq, c, h):
    """Fraction of all agents that are in class ``c`` with age above h."""
    return eq.classes[c].fraction - cdf_at(eq, c, h)


def mean_aoi_class(eq, c):
    """Contribution of class ``c`` to the mean rescaled AoI.

    kappa H^2 / 2 - eta H + eta^2 / kappa.
    """
    kappa = eq.kappas[c]
    eta = eq.classes[c].fraction
    threshold = eq.classes[c].threshold_rescaled
    return kappa * threshold ** 2 / 2.0 - eta * threshold + eta ** 2 / kappa


def _power_tail(threshold, scale, m):
    """int_0^inf (H + s u)^m e^{-u} du."""
    if float(m).is_integer():
        m = int(m)
        return math.fsum(
            special.poch(m - k + 1, k) * threshold ** (m - k) * scale ** k
            for k in range(m + 1))
    value, _ = integrate.quad(
        lambda u: (threshold + scale * u) ** m * math.exp(-u),
        0.0, np.inf, epsabs=0.0, epsrel=QUAD_EPSREL, limit=200)
    return value


def _log_tail(threshold, scale, a):
    """int_0^inf log(1 + a (H + s u)) e^{-u} du."""
    value, _ = integrate.quad(
        lambda u: math.log1p(a * (threshold + scale * u)) * math.exp(-u),
        0.0, np.inf, epsabs=0.0, epsrel=QUAD_EPSREL, limit=200)
    return value


def _class_age_value(eq, c, V):
    kappa = eq.kappas[c]
    threshold = eq.classes[c].threshold_rescaled
    scale = 0.0 if eq.is_boundary else eq.tail_scale(c)

    if V.kind == 'linear':
        return mean_aoi_class(eq, c)

    if V.kind == 'power':
        flat = kappa * threshold ** (V.m + 1) / (V.m + 1)
        tail = kappa * scale * _power_tail(threshold, scale, V.m) \
            if scale > 0.0 else 0.0
        return flat + tail

    # (1 + aH) log(1 + aH) - aH, divided by a
    ah = V.a * threshold
    flat = kappa * ((1.0 + ah) * math.log1p(ah) - ah) / V.a
    tail = kappa * scale * _log_tail(threshold, scale, V.a) \
        if scale > 0.0 else 0.0
    return flat + tail


def mean_age_value(eq, V):
    """Stationary mean of V(h) over all agents."""
    return math.fsum(_class_age_value(eq, c, V)
                     for c in range(eq.num_classes))


def moment(eq, k):
    return mean_age_value(eq, AgeFunction.power(k))
