"""Finite-volume integration of the transient fluid PDE.

Each class lives on its own cells [k w_c, (k + 1) w_c) whose width w_c is
the largest value not above the grid step that puts the class threshold
exactly on a cell edge. Densities are cell averages. One step moves mass
downstream by dt (first-order upwind; an exact shift when dt equals the
cell width), decays the queued mass above each threshold and re-injects
exactly the removed mass at h = 0.

The queue size beta used for the decay over a step is implicit: it is the
fraction of agents above threshold at the end of that step. The service
rate then stays within the success probabilities, and the cell-averaged
equilibrium is a fixed point of the scheme when dt equals the cell width.
"""
import logging
import math

import numpy as np
from scipy import optimize, stats

from ..errors import CflViolation, MassDeficit, OutOfRangeParameter
from ..model import NetworkSpec, validate_classes
from .equilibrium import FluidEquilibrium, cdf_at, density_at

log = logging.getLogger(__name__)

GRID_STEP = 1e-3
TAIL_FACTOR = 20.0
BETA_FLOOR = 1e-12
BETA_XTOL = 1e-15
INITIAL_MASS_TOLERANCE = 1e-3
# measured: mass only moves through rounding and the cells beyond h_max
SCHEME_CONSTANT = 1.0


def default_h_max(classes, tail_factor=TAIL_FACTOR):
    return max(c.threshold_rescaled for c in classes) + \
        tail_factor / min(c.success_prob for c in classes)


def mass_tolerance(grid_step, dt, t_end, c0=SCHEME_CONSTANT):
    return c0 * (grid_step + dt) * t_end


def cell_layout(classes, grid_step):
    """Threshold cell index and cell width of every class.

    A zero threshold keeps the nominal grid step and index 0.
    """
    counts, widths = [], []
    for c in classes:
        cells = int(math.ceil(c.threshold_rescaled / grid_step - 1e-9))
        if cells <= 0:
            counts.append(0)
            widths.append(grid_step)
        else:
            counts.append(cells)
            widths.append(c.threshold_rescaled / cells)
    return np.array(counts, dtype=int), np.array(widths)


class TransientSolution(object):
    """Cell-averaged class densities at one rescaled time.

    ``densities[c, k]`` is the average density of class c on cell k of
    width ``widths[c]``; ``grid[c, k]`` is that cell's midpoint. ``trace``
    is filled by ``run_to`` with (time, sup distance, mass) samples when a
    reference density is supplied.
    """

    def __init__(self, classes, densities, grid_step, h_max, time=0.0,
                 trace=None):
        self.classes = tuple(classes)
        self.densities = densities
        self.grid_step = float(grid_step)
        self.h_max = float(h_max)
        self.time = float(time)
        self.trace = list(trace) if trace is not None else []

        self.counts, self.widths = cell_layout(self.classes, self.grid_step)
        index = np.arange(densities.shape[1])
        self.grid = (index[np.newaxis, :] + 0.5) * self.widths[:, np.newaxis]
        self._above = index[np.newaxis, :] >= self.counts[:, np.newaxis]
        self._tail = index[np.newaxis, :] > self.counts[:, np.newaxis]
        self._probs = np.array([c.success_prob for c in self.classes])

    def __repr__(self):
        return "<{}(t={:g}, cells={})>".format(
            self.__class__.__name__, self.time, self.densities.shape[1])

    @property
    def max_step(self):
        """Largest dt that keeps every class within the CFL bound."""
        return float(self.widths.min())

    def edges(self, c):
        return np.arange(self.densities.shape[1] + 1) * self.widths[c]

    def masses(self):
        return self.densities * self.widths[:, np.newaxis]

    def _replace(self, masses, time):
        return TransientSolution(self.classes,
                                 masses / self.widths[:, np.newaxis],
                                 self.grid_step, self.h_max, time=time,
                                 trace=self.trace)

    def class_mass(self, c):
        return float(self.densities[c].sum() * self.widths[c])

    def mass(self):
        return float(self.masses().sum())

    def below_threshold_mass(self):
        """sum_c F_c(t, H_c), exact on the aligned cells."""
        return float(self.masses()[~self._above].sum())

    def beta(self):
        return max(float(self.masses()[self._above].sum()), BETA_FLOOR)

    def sample(self, reference):
        """Cell averages of a reference density on this state's cells.

        ``reference`` is a FluidEquilibrium, a density returned by
        ``equilibrium_initial_density`` or any callable f(c, h), which is
        taken at the cell midpoints.
        """
        if isinstance(reference, FluidEquilibrium):
            reference = equilibrium_initial_density(reference)
        rows = []
        for c in range(len(self.classes)):
            if hasattr(reference, 'cell_masses'):
                rows.append(reference.cell_masses(c, self.edges(c)) /
                            self.widths[c])
            else:
                values = reference(c, self.grid[c])
                rows.append(np.asarray(values, dtype=float) *
                            np.ones(self.grid.shape[1]))
        return np.vstack(rows)

    def sup_distance(self, reference):
        if not isinstance(reference, np.ndarray):
            reference = self.sample(reference)
        return float(np.max(np.abs(self.densities - reference)))

    def cdf_distance(self, reference):
        """Largest class CDF gap sup_h |F_c(t, h) - F_c(h)| on cell edges.

        ``reference`` is a FluidEquilibrium or any density with
        ``cell_masses``.
        """
        if isinstance(reference, FluidEquilibrium):
            reference = equilibrium_initial_density(reference)
        masses = self.masses()
        gaps = [np.max(np.abs(np.cumsum(
            masses[c] - reference.cell_masses(c, self.edges(c)))))
            for c in range(len(self.classes))]
        return float(max(gaps))

    def to_rows(self, every=1):
        """(class, h, density, time) rows for CSV export."""
        for c in range(len(self.classes)):
            for k in range(0, self.densities.shape[1], every):
                yield (c + 1, self.grid[c, k], self.densities[c, k],
                       self.time)


def _class_list(classes):
    if isinstance(classes, NetworkSpec):
        classes = classes.classes
    classes = validate_classes(tuple(classes))
    for i, c in enumerate(classes):
        if not c.has_threshold:
            raise OutOfRangeParameter(
                "class {} has no threshold".format(i), class_index=i)
    return classes


def gaussian_initial_density(classes, num_agents, mean=0.5):
    """Gaussian ages (mean N/2, variance N) in rescaled units.

    Each class gets eta_c times a Gaussian with mean ``mean`` and standard
    deviation 1 / sqrt(N), truncated to h >= 0.
    """
    classes = _class_list(classes)
    std = 1.0 / math.sqrt(num_agents)
    dist = stats.norm(loc=mean, scale=std)
    kept = dist.sf(0.0)

    def _density(c, h):
        h = np.asarray(h, dtype=float)
        return np.where(h >= 0.0,
                        classes[c].fraction * dist.pdf(h) / kept, 0.0)
    return _density


class EquilibriumDensity(object):
    """Equilibrium density as an initial condition or reference.

    Besides pointwise values it gives exact cell masses from the
    closed-form CDF.
    """

    def __init__(self, eq):
        self.eq = eq

    def __call__(self, c, h):
        return density_at(self.eq, c, h)

    def cell_masses(self, c, edges):
        return np.diff(cdf_at(self.eq, c, edges))


def equilibrium_initial_density(eq):
    return EquilibriumDensity(eq)


def _initial_masses(initial_density, classes, edges):
    rows = []
    for c in range(len(classes)):
        if hasattr(initial_density, 'cell_masses'):
            rows.append(np.asarray(initial_density.cell_masses(c, edges[c]),
                                   dtype=float))
            continue
        mids = 0.5 * (edges[c][1:] + edges[c][:-1])
        if callable(initial_density):
            values = initial_density(c, mids)
        else:
            values = initial_density[c](mids)
        width = edges[c][1] - edges[c][0]
        rows.append(np.asarray(values, dtype=float) * np.ones(len(mids)) *
                    width)
    return np.vstack(rows)


def init_transient(classes, initial_density, grid_step=GRID_STEP,
                   h_max=None):
    """Cell masses of an initial density at t = 0, renormalized.

    ``initial_density`` is either a callable f(c, h) or a sequence with one
    callable f(h) per class; plain callables are taken at cell midpoints.
    Each class is rescaled to carry exactly eta_c.

    :raises MassDeficit: the cells miss more than 1e-3 of the mass
    """
    classes = _class_list(classes)
    if h_max is None:
        h_max = default_h_max(classes)
    if not grid_step > 0:
        raise OutOfRangeParameter("grid_step must be positive",
                                  field='grid_step')
    if not h_max > max(c.threshold_rescaled for c in classes):
        raise OutOfRangeParameter("h_max must exceed every threshold",
                                  field='h_max')

    _, widths = cell_layout(classes, grid_step)
    cells = int(math.ceil(h_max / widths.min()))
    edges = [np.arange(cells + 1) * w for w in widths]
    masses = _initial_masses(initial_density, classes, edges)

    if np.any(masses < 0) or not np.all(np.isfinite(masses)):
        raise OutOfRangeParameter("initial density must be finite and "
                                  "nonnegative", field='initial_density')

    total = masses.sum()
    if abs(total - 1.0) > INITIAL_MASS_TOLERANCE:
        raise MassDeficit(
            "initial density carries {!r} on [0, {!r}]".format(total, h_max),
            mass=total)

    for c, spec in enumerate(classes):
        class_total = masses[c].sum()
        if class_total <= 0:
            raise MassDeficit("class {} has no mass on the grid".format(c),
                              class_index=c)
        masses[c] *= spec.fraction / class_total

    log.debug("initial state: %d cells, widths=%r, h_max=%r",
              cells, widths.tolist(), h_max)
    return TransientSolution(classes, masses / widths[:, np.newaxis],
                             grid_step, h_max)


def _queue_size(probs, queued, entering, fixed, dt):
    """Largest beta with beta = mass above threshold after the step.

    ``queued`` is the mass already above threshold and decays by
    exp(-p dt / beta); ``entering`` crosses the threshold during the step
    and spends dt / 2 above it on average. ``fixed`` counts classes with a
    zero threshold, which never leave the queue.
    """
    def _after(beta):
        x = probs * dt / beta
        return fixed + float(np.sum(queued * np.exp(-x) -
                                    entering * np.expm1(-x) / x))

    def _excess(beta):
        return _after(beta) - beta

    upper = fixed + float(queued.sum() + entering.sum())
    if upper <= BETA_FLOOR:
        return BETA_FLOOR
    if _excess(upper) >= 0.0:
        return upper

    lower = upper / 2.0
    while lower > BETA_FLOOR:
        if _excess(lower) > 0.0:
            return optimize.brentq(_excess, lower, upper, xtol=BETA_XTOL)
        upper, lower = lower, lower / 2.0
    return BETA_FLOOR


def _advance(state, masses, dt):
    """One step on a raw cell-mass array; returns (masses, beta)."""
    ratio = (dt / state.widths)[:, np.newaxis]
    moved = ratio * masses
    after = masses - moved
    after[:, 1:] += moved[:, :-1]

    totals = masses.sum(axis=1)
    rows = np.arange(len(state.classes))
    gated = state.counts > 0
    entering = np.where(gated, moved[rows, state.counts - 1], 0.0)
    queued = np.where(gated, (after * state._above).sum(axis=1) - entering,
                      0.0)
    beta = _queue_size(state._probs, queued, entering,
                       float(totals[~gated].sum()), dt)

    x = state._probs * dt / beta
    decay = np.exp(-x)
    after *= np.where(state._tail, decay[:, np.newaxis], 1.0)
    for c in np.flatnonzero(gated):
        k = state.counts[c]
        after[c, k] = (after[c, k] - entering[c]) * decay[c] - \
            entering[c] * np.expm1(-x[c]) / x[c]

    # removed mass and the outflow beyond h_max re-enter at h = 0
    after[:, 0] = 0.0
    after[:, 0] = np.maximum(totals - after.sum(axis=1), 0.0)
    return after, beta


def _check_step(state, dt):
    if dt > state.max_step * (1.0 + 1e-12):
        raise CflViolation(
            "dt {!r} exceeds cell width {!r}".format(dt, state.max_step),
            dt=dt, grid_step=state.grid_step, max_step=state.max_step)
    if not dt > 0:
        raise OutOfRangeParameter("dt must be positive", field='dt')


def step_pde(state, dt):
    """Advance one upwind step.

    :raises CflViolation: dt above the narrowest cell width
    """
    _check_step(state, dt)
    masses, _ = _advance(state, state.masses(), dt)
    return state._replace(masses, state.time + dt)


def run_to(state, t_end, dt=None, reference=None, record_every=None):
    """Step until ``t_end``; the last step is shortened to land exactly.

    ``dt`` defaults to the narrowest cell width. With ``reference`` set,
    ``trace`` receives (time, sup distance, mass) every ``record_every``
    units of rescaled time and at ``t_end``.
    """
    if dt is None:
        dt = state.max_step
    _check_step(state, dt)

    remaining = t_end - state.time
    if remaining <= 0:
        return state

    ref = state.sample(reference) if reference is not None else None
    steps = int(math.ceil(remaining / dt - 1e-9))
    every = None
    if ref is not None and record_every:
        every = max(int(round(record_every / dt)), 1)

    widths = state.widths[:, np.newaxis]
    trace = list(state.trace)
    masses = state.masses()
    time = state.time

    def _record():
        distance = float(np.max(np.abs(masses / widths - ref)))
        trace.append((time, distance, float(masses.sum())))

    if ref is not None:
        _record()

    beta = state.beta()
    for i in range(steps):
        step = min(dt, t_end - time) if i == steps - 1 else dt
        masses, beta = _advance(state, masses, step)
        time = t_end if i == steps - 1 else time + step
        if every is not None and (i + 1) % every == 0 and i != steps - 1:
            _record()

    if ref is not None:
        _record()

    drift = abs(masses.sum() - 1.0)
    allowed = mass_tolerance(state.grid_step, dt, t_end)
    if drift > allowed:
        log.warning("mass drift %r exceeds tolerance %r", drift, allowed)

    log.debug("ran %d steps to t=%r, beta=%r", steps, time, beta)
    result = state._replace(masses, time)
    result.trace = trace
    return result
