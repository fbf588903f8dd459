import numpy as np

from fluidaoi.model import ClassSpec


def random_instances(count, seed=2024, max_classes=5):
    """Class structures with thresholds strictly inside the existence region.

    Thresholds are H_c = u_c * C * eta_c / p_c with u_c < 1, so that
    sum eta / (H p) = sum 1 / (u_c C) > 1. About one class in ten gets a
    zero threshold.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    instances = []
    for _ in range(count):
        C = int(rng.integers(1, max_classes + 1))
        etas = rng.dirichlet(np.ones(C))
        etas = etas / etas.sum()
        probs = rng.uniform(0.05, 1.0, size=C)
        us = rng.uniform(0.05, 0.95, size=C)
        zero = rng.uniform(size=C) < 0.1
        classes = []
        for eta, p, u, z in zip(etas, probs, us, zero):
            threshold = 0.0 if z else u * C * eta / p
            classes.append(ClassSpec(eta, p, threshold))
        # absorb rounding so fractions sum to 1 within 1e-9
        last = classes[-1]
        total = sum(c.fraction for c in classes[:-1])
        classes[-1] = ClassSpec(1.0 - total, last.success_prob,
                                last.threshold_rescaled)
        instances.append(tuple(classes))
    return instances
