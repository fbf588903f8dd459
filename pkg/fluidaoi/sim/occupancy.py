from collections import namedtuple

import numpy as np

from ..model import rescale


class OccupancySnapshot(namedtuple('OccupancySnapshot',
                                   ['slot', 'num_agents', 'class_ages'])):
    """Rescaled ages of every agent at one slot, sorted within each class.

    CDF values are normalized by the total agent count, so class c
    saturates at eta_c and the classes together reach 1.
    """
    __slots__ = ()

    @classmethod
    def from_ages(cls, slot, ages, class_of_agent, num_classes):
        ages = np.asarray(ages)
        num_agents = len(ages)
        class_ages = tuple(
            rescale(np.sort(ages[class_of_agent == c]), num_agents).value
            for c in range(num_classes))
        return cls(int(slot), num_agents, class_ages)

    @property
    def num_classes(self):
        return len(self.class_ages)

    @property
    def all_ages(self):
        return np.sort(np.concatenate(self.class_ages))

    def empirical_cdf(self, c, h):
        counts = np.searchsorted(self.class_ages[c], h, side='right')
        return counts / float(self.num_agents)

    def total_cdf(self, h):
        counts = np.searchsorted(self.all_ages, h, side='right')
        return counts / float(self.num_agents)

    def serialize(self):
        return {
            'slot': self.slot,
            'num_agents': self.num_agents,
            'class_ages': [a.tolist() for a in self.class_ages],
        }


def empirical_cdf(snapshot, c, h):
    """Fraction of all N agents in class c with rescaled age <= h."""
    return snapshot.empirical_cdf(c, h)
