"""Scheduling policies for the slotted multiaccess simulator.

A policy object is bound to one ``SimState``. ``select`` returns the agent to
schedule in the current slot (or None to idle) and ``delivered`` is called
after the agent's age has been reset, so per-class structures stay sorted by
last-reset slot without ever scanning all N agents.
"""
from collections import deque, namedtuple
import logging
import math

from ..errors import OutOfRangeParameter
from ..model import round_threshold

log = logging.getLogger(__name__)


class PolicySpec(namedtuple('PolicySpec', ['kind', 'thresholds_unscaled',
                                           'index_exponent'])):
    """Which scheduler to run and its parameters.

    :param kind: ``threshold_random``, ``index``, ``whittle`` or a plug-in
    :param thresholds_unscaled: per-class integer thresholds in slots
    :param index_exponent: the index weight is p * h ** (index_exponent + 1)
    """
    __slots__ = ()

    def __new__(cls, kind, thresholds_unscaled=None, index_exponent=1.0):
        if thresholds_unscaled is not None:
            thresholds_unscaled = tuple(int(h) for h in thresholds_unscaled)
        return super(PolicySpec, cls).__new__(
            cls, kind, thresholds_unscaled, float(index_exponent))

    @classmethod
    def threshold_random(cls, thresholds_unscaled):
        return cls('threshold_random', thresholds_unscaled=thresholds_unscaled)

    @classmethod
    def from_rescaled(cls, thresholds_rescaled, num_agents):
        """Threshold policy rounding each H / N to the nearest slot count."""
        return cls.threshold_random(
            [round_threshold(h, num_agents) for h in thresholds_rescaled])

    @classmethod
    def index(cls, index_exponent=1.0):
        return cls('index', index_exponent=index_exponent)

    @property
    def weight_exponent(self):
        return self.index_exponent + 1.0

    @property
    def label(self):
        if self.kind == 'index':
            return 'index(e={:g})'.format(self.weight_exponent)
        return self.kind

    def validate(self, num_classes):
        if self.kind == 'threshold_random':
            if self.thresholds_unscaled is None:
                raise OutOfRangeParameter(
                    "threshold_random needs per-class thresholds",
                    field='thresholds')
            if len(self.thresholds_unscaled) != num_classes:
                raise OutOfRangeParameter(
                    "expected {} thresholds, got {}".format(
                        num_classes, len(self.thresholds_unscaled)),
                    field='thresholds')
            for i, h in enumerate(self.thresholds_unscaled):
                if h < 0:
                    raise OutOfRangeParameter(
                        "class {}: threshold {} is negative".format(i, h),
                        class_index=i, field='thresholds')
        if not (self.index_exponent >= 1.0 and
                math.isfinite(self.index_exponent)):
            raise OutOfRangeParameter(
                "index_exponent must be >= 1, got {}".format(
                    self.index_exponent),
                field='index_exponent')
        return self


class Policy(object):
    """Base class for schedulers registered under ``fluidaoi.policies``."""

    name = None

    def __init__(self, spec, state):
        self.spec = spec
        self.state = state

    def __repr__(self):
        return "<{}({})>".format(self.__class__.__name__, self.spec.label)

    def _sorted_class_members(self, c):
        """Agents of class c ordered by last-reset slot, then index."""
        state = self.state
        members = state.class_members[c]
        return sorted(members, key=lambda i: (state.reset_slots[i], i))

    def select(self, state):
        raise NotImplementedError()

    def delivered(self, agent, state):
        pass


class ThresholdRandom(Policy):
    """Uniform choice among agents whose age exceeds their class threshold.

    Agents wait in a per-class FIFO ordered by last reset until
    slot - reset > H_c, then join a flat eligible pool that supports O(1)
    uniform sampling and swap-removal.
    """

    name = 'threshold_random'

    def __init__(self, spec, state):
        super(ThresholdRandom, self).__init__(spec, state)
        self.thresholds = spec.thresholds_unscaled
        self.pending = [deque(self._sorted_class_members(c))
                        for c in range(state.num_classes)]
        self.eligible = []
        self._position = {}

    def _admit(self, t):
        reset_slots = self.state.reset_slots
        for c, queue in enumerate(self.pending):
            limit = t - self.thresholds[c]
            while queue and reset_slots[queue[0]] < limit:
                agent = queue.popleft()
                self._position[agent] = len(self.eligible)
                self.eligible.append(agent)

    def select(self, state):
        self._admit(state.slot)
        size = len(self.eligible)
        if size == 0:
            return None
        k = min(int(state.selection.uniform() * size), size - 1)
        return self.eligible[k]

    def delivered(self, agent, state):
        k = self._position.pop(agent)
        last = self.eligible.pop()
        if last != agent:
            self.eligible[k] = last
            self._position[last] = k
        self.pending[state.class_of[agent]].append(agent)


class IndexPolicy(Policy):
    """Serve the agent with the largest weight p_c * h ** e.

    Within a class the weight grows with age, so only the oldest group of
    each class (agents sharing the smallest last-reset slot) can win. Ties
    are broken uniformly over every agent in the tied head groups.
    """

    name = 'index'

    def __init__(self, spec, state):
        super(IndexPolicy, self).__init__(spec, state)
        self.exponent = spec.weight_exponent
        self.probs = [c.success_prob for c in state.network.classes]
        self.groups = []
        for c in range(state.num_classes):
            groups = deque()
            for agent in self._sorted_class_members(c):
                r = state.reset_slots[agent]
                if groups and groups[-1][0] == r:
                    groups[-1][1].append(agent)
                else:
                    groups.append([r, [agent]])
            self.groups.append(groups)

    def weight(self, c, h):
        return self.probs[c] * float(h) ** self.exponent

    def select(self, state):
        t = state.slot
        best = 0.0
        tied = []
        for c, groups in enumerate(self.groups):
            if not groups:
                continue
            w = self.weight(c, t - groups[0][0])
            if w > best:
                best = w
                tied = [c]
            elif w == best and w > 0.0:
                tied.append(c)

        if not tied:
            return None

        count = sum(len(self.groups[c][0][1]) for c in tied)
        if count == 1:
            return self.groups[tied[0]][0][1][0]

        k = min(int(state.selection.uniform() * count), count - 1)
        for c in tied:
            head = self.groups[c][0][1]
            if k < len(head):
                return head[k]
            k -= len(head)

    def delivered(self, agent, state):
        groups = self.groups[state.class_of[agent]]
        head = groups[0][1]
        head.remove(agent)
        if not head:
            groups.popleft()

        r = state.reset_slots[agent]
        if groups and groups[-1][0] == r:
            groups[-1][1].append(agent)
        else:
            groups.append([r, [agent]])


class WhittlePolicy(IndexPolicy):
    """Index policy with the full weight p h (h + 2 / p - 1) / 2."""

    name = 'whittle'

    def weight(self, c, h):
        p = self.probs[c]
        h = float(h)
        return p * h * (h + 2.0 / p - 1.0) / 2.0


BUILTIN_POLICIES = {
    ThresholdRandom.name: ThresholdRandom,
    IndexPolicy.name: IndexPolicy,
    WhittlePolicy.name: WhittlePolicy,
}


def policy_select(state, policy):
    """Agent index to schedule this slot, or None when idle."""
    return policy.select(state)
