"""Seeded slotted-time simulation of N agents sharing one channel.

Each agent stores the slot of its last reset r_i, so its age in slot t is
t - r_i and the per-slot update touches only the scheduled agent. Age sums
are accumulated once per reset cycle, in exact integer arithmetic for the
AoI and from prefix sums of V for the age function.
"""
from collections import namedtuple
import logging
import math

import numpy as np
import six

from ..config import Config
from ..errors import OutOfRangeParameter
from ..model import AgeFunction, validate_network
from .occupancy import OccupancySnapshot

log = logging.getLogger(__name__)

DEFAULT_HORIZON = 10 ** 6
STREAMS = ('selection', 'channel', 'init')
BLOCK_SIZE = 4096


class RandomStream(object):
    """Buffered uniforms from a Philox generator.

    Values are drawn in fixed blocks; the sequence seen by callers depends
    only on the seed, never on the block size.
    """

    def __init__(self, seed_sequence, block_size=BLOCK_SIZE):
        self.generator = np.random.Generator(np.random.Philox(seed_sequence))
        self.block_size = block_size
        self._buffer = []
        self._index = 0

    def uniform(self):
        if self._index >= len(self._buffer):
            self._buffer = self.generator.random(self.block_size).tolist()
            self._index = 0
        value = self._buffer[self._index]
        self._index += 1
        return value


def make_streams(seed):
    """One independent stream per named purpose, split from ``seed``."""
    children = np.random.SeedSequence(seed).spawn(len(STREAMS))
    return dict(zip(STREAMS, (RandomStream(s) for s in children)))


class SimConfig(namedtuple('SimConfig', [
        'network', 'policy', 'horizon', 'seed', 'snapshot_slots',
        'age_function', 'initial_ages', 'burn_in', 'reset_to_one',
        'rescaled_age_function'])):
    """Everything a single run depends on.

    ``initial_ages`` is ``'zero'``, ``'gaussian'`` or a sequence of N
    nonnegative integers.
    """
    __slots__ = ()

    def __new__(cls, network, policy, horizon=DEFAULT_HORIZON, seed=0,
                snapshot_slots=(), age_function=None, initial_ages='zero',
                burn_in=0, reset_to_one=False, rescaled_age_function=True):
        if age_function is None:
            age_function = AgeFunction.linear()
        if not isinstance(initial_ages, six.string_types):
            initial_ages = tuple(int(h) for h in initial_ages)
        return super(SimConfig, cls).__new__(
            cls, network, policy, int(horizon), int(seed),
            tuple(sorted(set(int(s) for s in snapshot_slots))),
            age_function, initial_ages, int(burn_in), bool(reset_to_one),
            bool(rescaled_age_function))


def validate_sim_config(config):
    validate_network(config.network)
    config.policy.validate(config.network.num_classes)

    if config.horizon < 1:
        raise OutOfRangeParameter("horizon must be >= 1", field='horizon')
    if not 0 <= config.burn_in < config.horizon:
        raise OutOfRangeParameter(
            "burn_in must lie in [0, horizon)", field='burn_in')
    if not 0 <= config.seed < 2 ** 64:
        raise OutOfRangeParameter(
            "seed must be a 64-bit unsigned integer", field='seed')
    for s in config.snapshot_slots:
        if not 1 <= s <= config.horizon:
            raise OutOfRangeParameter(
                "snapshot slot {} outside [1, {}]".format(s, config.horizon),
                field='snapshot_slots')

    if isinstance(config.initial_ages, six.string_types):
        if config.initial_ages not in ('zero', 'gaussian'):
            raise OutOfRangeParameter(
                "unknown initial_ages '{}'".format(config.initial_ages),
                field='initial_ages')
    else:
        if len(config.initial_ages) != config.network.num_agents:
            raise OutOfRangeParameter(
                "expected {} initial ages, got {}".format(
                    config.network.num_agents, len(config.initial_ages)),
                field='initial_ages')
        if min(config.initial_ages) < 0:
            raise OutOfRangeParameter(
                "initial ages must be nonnegative", field='initial_ages')
    return config


def gaussian_ages(stream, num_agents):
    """Ages drawn from N(N / 2, N), negatives redrawn, rounded to slots."""
    generator = stream.generator
    mean, std = num_agents / 2.0, np.sqrt(num_agents)
    ages = generator.normal(mean, std, size=num_agents)
    negative = ages < 0
    while negative.any():
        ages[negative] = generator.normal(mean, std, size=negative.sum())
        negative = ages < 0
    return np.rint(ages).astype(np.int64)


def initial_ages(config, streams):
    N = config.network.num_agents
    if config.initial_ages == 'zero':
        return np.zeros(N, dtype=np.int64)
    if config.initial_ages == 'gaussian':
        return gaussian_ages(streams['init'], N)
    return np.array(config.initial_ages, dtype=np.int64)


class AgeValueTable(object):
    """Prefix sums of V(k / divisor) over integer ages k, grown on demand."""

    def __init__(self, age_function, divisor=1):
        self.age_function = age_function
        self.divisor = float(divisor)
        self._prefix = np.zeros(1)

    def _grow(self, size):
        size = max(size, 2 * len(self._prefix), 1024)
        values = self.age_function(np.arange(size - 1) / self.divisor)
        self._prefix = np.concatenate(([0.0], np.cumsum(values)))

    def range_sum(self, lo, hi):
        """sum_{k=lo}^{hi} V(k / divisor)."""
        if hi + 2 > len(self._prefix):
            self._grow(hi + 2)
        return float(self._prefix[hi + 1] - self._prefix[lo])


class SimState(object):
    """Mutable state of one run.

    ``reset_slots[i]`` is the slot at which agent i's age was last zero
    (possibly negative for initial ages), so ``ages = slot - reset_slots``.
    """

    def __init__(self, config, streams=None):
        self.config = config
        self.network = config.network
        self.num_classes = self.network.num_classes
        self.num_agents = self.network.num_agents
        self.streams = streams if streams is not None \
            else make_streams(config.seed)
        self.selection = self.streams['selection']
        self.channel = self.streams['channel']

        self.class_of = self.network.class_of_agent.tolist()
        self.class_members = [[] for _ in range(self.num_classes)]
        for agent, c in enumerate(self.class_of):
            self.class_members[c].append(agent)
        self.probs = [c.success_prob for c in self.network.classes]

        self.slot = 0
        self.reset_slots = (-initial_ages(config, self.streams)).tolist()
        self.reset_offset = 0 if config.reset_to_one else 1

        divisor = self.num_agents if config.rescaled_age_function else 1
        self.table = AgeValueTable(config.age_function, divisor)
        self.burn_in = config.burn_in
        self.cycle_start = [0] * self.num_agents
        self.sum_age = [0] * self.num_classes
        self.sum_value = [0.0] * self.num_classes
        self.idle_slots = 0
        self.attempts = 0
        self.deliveries = 0

    @property
    def ages(self):
        return self.slot - np.array(self.reset_slots, dtype=np.int64)

    def age(self, agent):
        return self.slot - self.reset_slots[agent]

    def _flush(self, agent, last_slot):
        """Add the ages of ``agent`` over its open cycle up to last_slot."""
        first = max(self.cycle_start[agent], self.burn_in)
        if last_slot < first:
            return
        r = self.reset_slots[agent]
        lo, hi = first - r, last_slot - r
        c = self.class_of[agent]
        self.sum_age[c] += (lo + hi) * (hi - lo + 1) // 2
        self.sum_value[c] += self.table.range_sum(lo, hi)

    def record_delivery(self, agent):
        """Close the agent's cycle at the current slot and reset its age."""
        t = self.slot
        self._flush(agent, t)
        self.cycle_start[agent] = t + 1
        self.reset_slots[agent] = t + self.reset_offset
        self.deliveries += 1

    def close(self):
        """Flush every open cycle through the last completed slot."""
        last = self.slot - 1
        for agent in range(self.num_agents):
            self._flush(agent, last)
            self.cycle_start[agent] = self.slot

    def snapshot(self):
        return OccupancySnapshot.from_ages(
            self.slot, self.ages, self.network.class_of_agent,
            self.num_classes)


def make_policy(spec, state):
    return Config.policy_class(spec.kind)(spec, state)


def step_slot(state, policy):
    """Advance one slot: schedule, draw the channel, then age everyone."""
    agent = policy.select(state)
    if agent is None:
        state.idle_slots += 1
    else:
        state.attempts += 1
        if state.channel.uniform() < state.probs[state.class_of[agent]]:
            state.record_delivery(agent)
            policy.delivered(agent, state)
    state.slot += 1
    return state


SimResult = namedtuple('SimResult', [
    'avg_aoi', 'avg_agefn', 'class_avg_aoi', 'slots', 'idle_slots',
    'deliveries', 'snapshots'])


class Simulator(object):
    """Drive one seeded run of ``SimConfig``."""

    def __init__(self, config):
        self.config = validate_sim_config(config)
        self.state = SimState(config)
        self.policy = make_policy(config.policy, self.state)

    def __repr__(self):
        return "<Simulator(N={}, policy={}, seed={})>".format(
            self.state.num_agents, self.config.policy.label,
            self.config.seed)

    def step_slot(self):
        return step_slot(self.state, self.policy)

    def snapshot(self):
        return self.state.snapshot()

    def run(self):
        config = self.config
        state = self.state
        pending = list(config.snapshot_slots)
        snapshots = []

        log.debug("running %r for %d slots", self, config.horizon)
        while state.slot < config.horizon:
            if pending and state.slot == pending[0]:
                snapshots.append(state.snapshot())
                pending.pop(0)
            step_slot(state, self.policy)
        if pending and state.slot == pending[0]:
            snapshots.append(state.snapshot())

        state.close()
        return self.result(snapshots)

    def result(self, snapshots=()):
        state = self.state
        slots = state.slot - state.burn_in
        N = state.num_agents
        sizes = self.config.network.class_sizes
        total_age = sum(state.sum_age)
        return SimResult(
            avg_aoi=total_age / float(slots * N),
            avg_agefn=math.fsum(state.sum_value) / (slots * N),
            class_avg_aoi=tuple(s / float(slots * n)
                                for s, n in zip(state.sum_age, sizes)),
            slots=slots,
            idle_slots=state.idle_slots,
            deliveries=state.deliveries,
            snapshots=tuple(snapshots))


def run(config):
    """Run ``config`` to its horizon and return a ``SimResult``."""
    return Simulator(config).run()
