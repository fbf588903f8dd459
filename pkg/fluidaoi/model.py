"""Shared value types for the multiaccess AoI model.

Thresholds live in rescaled units (h / N) everywhere inside the package;
helpers here convert to and from unscaled slot counts.
"""
from collections import namedtuple

import numpy as np

from .errors import (FractionSumMismatch,
                     NonIntegerClassSize,
                     OutOfRangeParameter)


FRACTION_TOLERANCE = 1e-9


class ClassSpec(namedtuple('ClassSpec', ['fraction', 'success_prob',
                                         'threshold_rescaled'])):
    """One class of statistically identical agents.

    :param fraction: eta_c, share of all agents in this class
    :param success_prob: per-attempt delivery probability
    :param threshold_rescaled: scheduling threshold in h / N units, or None
    """
    __slots__ = ()

    def __new__(cls, fraction, success_prob, threshold_rescaled=None):
        return super(ClassSpec, cls).__new__(
            cls, float(fraction), float(success_prob),
            None if threshold_rescaled is None else float(threshold_rescaled))

    @property
    def has_threshold(self):
        return self.threshold_rescaled is not None

    def with_threshold(self, threshold_rescaled):
        return self._replace(threshold_rescaled=float(threshold_rescaled))


class NetworkSpec(namedtuple('NetworkSpec', ['classes', 'num_agents'])):
    __slots__ = ()

    def __new__(cls, classes, num_agents):
        return super(NetworkSpec, cls).__new__(
            cls, tuple(classes), int(num_agents))

    @property
    def num_classes(self):
        return len(self.classes)

    @property
    def class_sizes(self):
        return tuple(int(round(c.fraction * self.num_agents))
                     for c in self.classes)

    @property
    def class_of_agent(self):
        """Class index of every agent; agents are numbered class by class."""
        return np.repeat(np.arange(self.num_classes), self.class_sizes)

    @property
    def success_probs(self):
        return np.array([c.success_prob for c in self.classes])

    @property
    def fractions(self):
        return np.array([c.fraction for c in self.classes])

    def with_thresholds(self, thresholds_rescaled):
        if len(thresholds_rescaled) != self.num_classes:
            raise OutOfRangeParameter(
                "expected {} thresholds, got {}".format(
                    self.num_classes, len(thresholds_rescaled)))
        return self._replace(classes=tuple(
            c.with_threshold(h)
            for c, h in zip(self.classes, thresholds_rescaled)))

    def unscaled_thresholds(self):
        return [round_threshold(c.threshold_rescaled, self.num_agents)
                for c in self.classes]


def validate_classes(classes):
    """Check per-class parameter ranges and the fraction sum."""
    if len(classes) == 0:
        raise OutOfRangeParameter("at least one class is required")

    for i, c in enumerate(classes):
        if not 0.0 < c.fraction <= 1.0:
            raise OutOfRangeParameter(
                "class {}: fraction {} not in (0, 1]".format(i, c.fraction),
                class_index=i, field='fraction')
        if not 0.0 < c.success_prob <= 1.0:
            raise OutOfRangeParameter(
                "class {}: success_prob {} not in (0, 1]".format(
                    i, c.success_prob),
                class_index=i, field='success_prob')
        if c.threshold_rescaled is not None and \
           not c.threshold_rescaled >= 0.0:
            raise OutOfRangeParameter(
                "class {}: threshold {} is negative".format(
                    i, c.threshold_rescaled),
                class_index=i, field='threshold_rescaled')

    total = sum(c.fraction for c in classes)
    if abs(total - 1.0) > FRACTION_TOLERANCE:
        raise FractionSumMismatch(
            "class fractions sum to {!r}".format(total),
            class_index=len(classes) - 1, total=total)

    return classes


def validate_network(spec):
    """Return ``spec`` unchanged if every invariant holds.

    :raises OutOfRangeParameter: a fraction, probability or threshold is
        outside its range
    :raises FractionSumMismatch: fractions do not sum to one
    :raises NonIntegerClassSize: fraction * N is not a positive integer
    """
    if spec.num_agents < 1:
        raise OutOfRangeParameter(
            "num_agents must be positive, got {}".format(spec.num_agents),
            field='num_agents')

    validate_classes(spec.classes)

    for i, c in enumerate(spec.classes):
        size = c.fraction * spec.num_agents
        if abs(size - round(size)) > FRACTION_TOLERANCE * spec.num_agents \
           or round(size) < 1:
            raise NonIntegerClassSize(
                "class {}: {} * {} = {} agents".format(
                    i, c.fraction, spec.num_agents, size),
                class_index=i, size=size)

    return spec


class RescaledAge(namedtuple('RescaledAge', ['unscaled', 'num_agents'])):
    """An age h / N that remembers its unscaled origin.

    ``unscaled`` may also be an array of ages; ``unscale`` returns it as
    given.
    """
    __slots__ = ()

    @property
    def value(self):
        return self.unscaled / float(self.num_agents)

    def unscale(self):
        return self.unscaled

    def __float__(self):
        return self.value


def rescale(h, num_agents):
    if num_agents < 1:
        raise OutOfRangeParameter("N must be positive", field='num_agents')
    return RescaledAge(h, int(num_agents))


def unscale(age, num_agents=None):
    if isinstance(age, RescaledAge):
        return age.unscale()
    return age * num_agents


def rescale_threshold(H_unscaled, num_agents):
    """Unscaled threshold in slots to rescaled units, H / N."""
    return rescale(H_unscaled, num_agents).value


def unscale_threshold(H_rescaled, num_agents):
    return unscale(H_rescaled, num_agents)


def round_threshold(H_rescaled, num_agents):
    """Nearest integer slot count for a rescaled threshold."""
    return int(np.floor(H_rescaled * num_agents + 0.5))


class AgeFunction(namedtuple('AgeFunction', ['kind', 'm', 'a'])):
    """Value-of-information functional applied to the AoI.

    ``linear`` is V(h) = h, ``power`` is h ** m and ``log`` is log(1 + a h).
    """
    __slots__ = ()

    KINDS = ('linear', 'power', 'log')

    def __new__(cls, kind='linear', m=None, a=None):
        if kind not in cls.KINDS:
            raise OutOfRangeParameter(
                "unknown age function '{}'".format(kind), field='kind')
        if kind == 'power':
            if m is None or not m > 0:
                raise OutOfRangeParameter(
                    "power exponent must be positive, got {}".format(m),
                    field='m')
            m = float(m)
        if kind == 'log':
            if a is None or not a > 0:
                raise OutOfRangeParameter(
                    "log slope must be positive, got {}".format(a),
                    field='a')
            a = float(a)
        return super(AgeFunction, cls).__new__(cls, kind, m, a)

    @classmethod
    def linear(cls):
        return cls('linear')

    @classmethod
    def power(cls, m):
        return cls('power', m=m)

    @classmethod
    def log(cls, a):
        return cls('log', a=a)

    @classmethod
    def parse(cls, kind, m=None, a=None):
        kind = kind.strip().lower()
        return cls(kind,
                   m=None if m in (None, '') else float(m),
                   a=None if a in (None, '') else float(a))

    @property
    def label(self):
        if self.kind == 'power':
            return 'power(m={:g})'.format(self.m)
        if self.kind == 'log':
            return 'log(a={:g})'.format(self.a)
        return 'linear'

    def __call__(self, h):
        h = np.asarray(h, dtype=float)
        if self.kind == 'linear':
            return h
        if self.kind == 'power':
            return np.power(h, self.m)
        return np.log1p(self.a * h)

