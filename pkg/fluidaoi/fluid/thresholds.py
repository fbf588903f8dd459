"""Optimal thresholds for linear, power and logarithmic age functions.

All thresholds returned here are rescaled (h / N). ``unscale_solution``
converts a solution to slot units for a concrete agent count.
"""
from collections import namedtuple
import logging
import math

import numpy as np
from scipy import optimize

from ..errors import EpsilonOutOfRange, NoConvergence, OutOfRangeParameter
from ..model import (AgeFunction,
                     NetworkSpec,
                     round_threshold,
                     unscale_threshold,
                     validate_classes)

log = logging.getLogger(__name__)

EPSILON_FACTOR = 1e-3
KKT_TOLERANCE = 1e-10
MAX_ITERATIONS = 200

_RTOL = 4 * np.finfo(float).eps

ThresholdSolution = namedtuple(
    'ThresholdSolution', ['age_function', 'thresholds', 'optimum', 'kkt'])

UnscaledSolution = namedtuple(
    'UnscaledSolution', ['num_agents', 'thresholds', 'rounded', 'optimum'])


class KktSolution(namedtuple('KktSolution', ['xs', 'lam', 'a',
                                             'residuals'])):
    """Solution of the stationarity system for the log age function.

    ``lam`` is the shared multiplier, ``residuals`` holds the worst
    per-class stationarity residual and the relative constraint residual.
    """
    __slots__ = ()

    @property
    def thresholds(self):
        return tuple(x / self.a for x in self.xs)


def _class_list(classes):
    if isinstance(classes, NetworkSpec):
        classes = classes.classes
    return validate_classes(tuple(classes))


def _sqrt_weight_sum(classes):
    return math.fsum(c.fraction / math.sqrt(c.success_prob) for c in classes)


def default_epsilon(classes, factor=EPSILON_FACTOR):
    return factor * min(c.fraction for c in _class_list(classes))


def thresholds_linear(classes, epsilon=None):
    """Thresholds minimizing the mean AoI, backed off by ``epsilon``.

    ``epsilon = 0`` gives the limiting thresholds (1 / sqrt(p_c)) *
    sum_j eta_j / sqrt(p_j), which sit on the existence boundary; any
    positive epsilon keeps beta strictly positive.

    :raises EpsilonOutOfRange: epsilon outside [0, min eta)
    """
    classes = _class_list(classes)
    if epsilon is None:
        epsilon = default_epsilon(classes)

    smallest = min(c.fraction for c in classes)
    if not 0.0 <= epsilon < smallest:
        raise EpsilonOutOfRange(
            "epsilon {!r} not in [0, {!r})".format(epsilon, smallest),
            epsilon=epsilon)

    eps2 = epsilon ** 2
    total = math.fsum(math.sqrt((c.fraction ** 2 + eps2) / c.success_prob)
                      for c in classes)
    return [(c.fraction - epsilon) /
            math.sqrt((c.fraction ** 2 + eps2) * c.success_prob) * total
            for c in classes]


def lower_bound(classes, num_agents):
    """Lower bound on the average AoI of any scheduler, in slots.

    (N / 2) * (sum_c eta_c / sqrt(p_c))^2.
    """
    return num_agents / 2.0 * _sqrt_weight_sum(_class_list(classes)) ** 2


def predicted_avg_aoi(classes, num_agents):
    """Time-average AoI of the threshold policy in slots.

    The fluid limit meets ``lower_bound``; the simulated average sits above
    it by a finite-N gap that shrinks as N grows.
    """
    return lower_bound(classes, num_agents)


def thresholds_power(classes, m):
    """Closed-form optimum for V(h) = h ** m."""
    classes = _class_list(classes)
    if not m > 0:
        raise OutOfRangeParameter(
            "power exponent must be positive, got {}".format(m), field='m')

    weight = math.fsum(c.fraction * c.success_prob ** (-m / (m + 1.0))
                       for c in classes)
    thresholds = tuple(c.success_prob ** (-1.0 / (m + 1.0)) * weight
                       for c in classes)
    return ThresholdSolution(AgeFunction.power(m), thresholds,
                             weight ** (m + 1) / (m + 1), None)


def _log_gap(x):
    return math.log1p(x) - x


def solve_log_gap(target):
    """Positive x with log(1 + x) - x = target, for target < 0."""
    if target >= 0.0:
        raise OutOfRangeParameter(
            "log gap target must be negative, got {!r}".format(target))

    def f(x):
        return _log_gap(x) - target

    hi = 2.0 * abs(target) + 2.0
    x = optimize.brentq(f, 0.0, hi, xtol=1e-300, rtol=_RTOL,
                        maxiter=MAX_ITERATIONS)
    # g'(x) = -x / (1 + x)
    return optimize.newton(f, x, fprime=lambda x: -x / (1.0 + x),
                           tol=1e-300, maxiter=3, disp=False)


def _log_residuals(classes, a, lam, xs):
    stationarity = max(abs(_log_gap(x) - lam / c.success_prob)
                       for c, x in zip(classes, xs))
    constraint = abs(a * math.fsum(c.fraction / (x * c.success_prob)
                                   for c, x in zip(classes, xs)) - 1.0)
    return stationarity, constraint


def solve_log_kkt(classes, a, tolerance=KKT_TOLERANCE,
                  max_iterations=MAX_ITERATIONS):
    """Nested bisection for the log age function stationarity system.

    The outer loop bisects on t = log(-lambda); for each multiplier the
    per-class equation log(1 + x) - x = lambda / p_c has a unique positive
    root.

    :raises NoConvergence: residuals above ``tolerance``
    """
    classes = _class_list(classes)
    if not a > 0:
        raise OutOfRangeParameter(
            "log slope must be positive, got {}".format(a), field='a')

    def xs_for(t):
        lam = -math.exp(t)
        return [solve_log_gap(lam / c.success_prob) for c in classes]

    def excess(t):
        xs = xs_for(t)
        return a * math.fsum(c.fraction / (x * c.success_prob)
                             for c, x in zip(classes, xs)) - 1.0

    # small-x expansion: x_c ~ sqrt(-2 lambda / p_c)
    guess = 0.5 * (a * _sqrt_weight_sum(classes)) ** 2
    lo = hi = math.log(guess)
    for _ in range(max_iterations):
        if excess(lo) > 0.0:
            break
        lo -= 2.0
    else:
        raise NoConvergence("could not bracket lambda from above", a=a)
    for _ in range(max_iterations):
        if excess(hi) < 0.0:
            break
        hi += 2.0
    else:
        raise NoConvergence("could not bracket lambda from below", a=a)

    t = optimize.bisect(excess, lo, hi, xtol=1e-14, rtol=_RTOL,
                        maxiter=max_iterations)
    lam = -math.exp(t)
    xs = tuple(xs_for(t))
    residuals = _log_residuals(classes, a, lam, xs)
    log.debug("log kkt a=%r lambda=%r xs=%r residuals=%r",
              a, lam, xs, residuals)

    if max(residuals) > tolerance:
        raise NoConvergence(
            "kkt residuals {!r} above {!r}".format(residuals, tolerance),
            a=a, stationarity=residuals[0], constraint=residuals[1])
    return KktSolution(xs, lam, float(a), residuals)


def log_optimum(classes, xs):
    """sum_c (kappa_c / a + eta_c) log(1 + a eta_c / kappa_c) - eta_c with
    kappa_c = a eta_c / x_c."""
    return math.fsum(c.fraction * (1.0 / x + 1.0) * math.log1p(x) -
                     c.fraction for c, x in zip(_class_list(classes), xs))


def thresholds_log(classes, a, **kwargs):
    """Optimal thresholds for V(h) = log(1 + a h).

    Thresholds are x_c / a, which reduces to the linear optimum as a -> 0.
    """
    kkt = solve_log_kkt(classes, a, **kwargs)
    return ThresholdSolution(AgeFunction.log(a), kkt.thresholds,
                             log_optimum(classes, kkt.xs), kkt)


def optimal_thresholds(classes, age_function, epsilon=None, **kwargs):
    """Dispatch on the age function kind.

    For the linear case the returned optimum is the epsilon -> 0 value
    sum(eta / sqrt(p))^2 / 2, whatever ``epsilon`` is used for the
    thresholds themselves.
    """
    if age_function.kind == 'power':
        return thresholds_power(classes, age_function.m)
    if age_function.kind == 'log':
        return thresholds_log(classes, age_function.a, **kwargs)

    thresholds = thresholds_linear(classes, epsilon=epsilon)
    optimum = _sqrt_weight_sum(_class_list(classes)) ** 2 / 2.0
    return ThresholdSolution(age_function, tuple(thresholds), optimum, None)


def unscale_solution(solution, num_agents, classes=None, **kwargs):
    """Express a rescaled solution in slots for ``num_agents`` agents.

    Thresholds scale by N. The optimum is restated for V of the unscaled
    age: N h for linear, N ** m h ** m for power, and for log(1 + a h) the
    optimum of the slope N a problem, which needs ``classes``; ``kwargs``
    go to ``solve_log_kkt``.
    """
    V = solution.age_function
    if V.kind == 'linear':
        optimum = solution.optimum * num_agents
    elif V.kind == 'power':
        optimum = solution.optimum * num_agents ** V.m
    elif classes is None:
        raise OutOfRangeParameter(
            "the unscaled log optimum needs the classes", field='classes')
    else:
        kkt = solve_log_kkt(classes, V.a * num_agents, **kwargs)
        optimum = log_optimum(classes, kkt.xs)
    return UnscaledSolution(
        num_agents,
        tuple(unscale_threshold(h, num_agents) for h in solution.thresholds),
        tuple(round_threshold(h, num_agents) for h in solution.thresholds),
        optimum)
