"""Bayesian phase inference: posteriors, peak structure, simulated records.

A uniform prior over (-pi, pi] turns each likelihood row P(m|phi) into a
posterior density p(phi|m) by normalization.  Posteriors here are
generally multimodal, so alongside the density we report the peak list
and circular summary statistics.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .exceptions import UndefinedCircularMeanError, ZeroProbabilityOutcomeError
from .grid import DEFAULT_GRID_SIZE, PhaseGrid
from .optics import (DEFAULT_GEOMETRY, InterferometerGeometry, LikelihoodTable,
                     Outcome, StateCoefficients, likelihood_table,
                     scattering_entries, _check_phase, _clamp_probs)

# relative height below which a strict local maximum is discarded as
# quadrature ripple; genuine secondary modes in scope sit above 1e-4
PEAK_REL_THRESHOLD = 1e-9
RESULTANT_TOL = 1e-12


@dataclass(eq=False)
class PhasePosterior:
    """Normalized posterior density p(phi_k | m) on a phase grid.

    ``peaks`` is filled in by :func:`count_peaks` as a list of
    (location, height) pairs sorted by location.
    """

    grid: PhaseGrid
    density: np.ndarray
    outcome: Outcome = None
    peaks: list = field(default_factory=list)


@dataclass(eq=False)
class MeasurementRecord:
    """Seeded sequence of outcomes drawn at a fixed true phase."""

    true_phase: float
    seed: int
    outcomes: list


@dataclass(eq=False)
class SimulationResult:
    record: MeasurementRecord
    posteriors: list

    @property
    def final_posterior(self) -> PhasePosterior:
        return self.posteriors[-1]


def posterior_density(likelihood_row, grid: PhaseGrid,
                      outcome: Outcome = None) -> PhasePosterior:
    """Posterior from one likelihood row under the uniform prior.

    p(phi_k|m) = P(m|phi_k) / sum_j P(m|phi_j) * weight.  A row that is
    zero everywhere has no posterior (the outcome cannot occur at any
    phase) and raises :class:`ZeroProbabilityOutcomeError`.
    """
    row = np.asarray(likelihood_row, dtype=np.float64)
    if row.shape != (grid.size,):
        raise ValueError(f"likelihood row has shape {row.shape}, expected "
                         f"({grid.size},)")
    if np.any(row < 0) or not np.all(np.isfinite(row)):
        raise ValueError("likelihood values must be finite and non-negative")
    norm = grid.integrate(row)
    if norm <= 0.0:
        raise ZeroProbabilityOutcomeError(
            "outcome has zero probability at every phase; posterior undefined")
    return PhasePosterior(grid=grid, density=row / norm, outcome=outcome)


def posterior_for_outcome(table: LikelihoodTable, outcome: Outcome) -> PhasePosterior:
    """Posterior of one tabulated outcome."""
    return posterior_density(table.row_for(outcome), table.grid, outcome=outcome)


def _wrap_angle(x: float) -> float:
    # map to (-pi, pi]
    y = math.fmod(x + math.pi, 2.0 * math.pi)
    if y < 0:
        y += 2.0 * math.pi
    y -= math.pi
    return math.pi if y == -math.pi else y


def _cyclic_runs(values: np.ndarray):
    """Run-length encode a cyclic sequence: (value, start, length) triples."""
    size = len(values)
    bounds = np.flatnonzero(values != np.roll(values, 1))
    if bounds.size == 0:  # constant sequence: one run covering the circle
        return [(float(values[0]), 0, size)]
    runs = []
    for i, start in enumerate(bounds):
        stop = bounds[(i + 1) % bounds.size]
        length = (stop - start) % size
        if length == 0:
            length = size
        runs.append((float(values[start]), int(start), int(length)))
    return runs


def _merged_runs(values: np.ndarray, tol: float):
    """Cyclic plateau groups: adjacent runs within ``tol`` of each other
    merge into one.  Returns (max value, start, length) per group."""
    runs = _cyclic_runs(values)
    if len(runs) == 1:
        return runs
    # group fields: max value, start, length, first-run value, last-run value
    groups = []
    for value, start, length in runs:
        if groups and abs(value - groups[-1][4]) <= tol:
            tail = groups[-1]
            tail[0] = max(tail[0], value)
            tail[2] += length
            tail[4] = value
        else:
            groups.append([value, start, length, value, value])
    if len(groups) > 1 and abs(groups[0][3] - groups[-1][4]) <= tol:
        # the plateau wraps across the seam between the last and first run
        last = groups.pop()
        head = groups[0]
        head[0] = max(head[0], last[0])
        head[1] = last[1]
        head[2] += last[2]
        head[3] = last[3]
    return [(value, start, length) for value, start, length, _, _ in groups]


def count_peaks(posterior: PhasePosterior,
                rel_threshold: float = PEAK_REL_THRESHOLD) -> int:
    """Count local maxima of the posterior on the periodic grid.

    Plateaus are merged and count once, located at the plateau midpoint;
    adjacent values closer than ``rel_threshold`` times the global
    maximum belong to the same plateau, which keeps round-off ripple on
    flat stretches from registering as structure.  A plateau is a peak
    when it is strictly greater than both cyclic neighbour plateaus and
    exceeds the same relative threshold.  A posterior that is flat to
    within the threshold is one maximal plateau spanning the whole
    circle and counts as a single peak.  The peak list (location,
    height), sorted by location, is stored on the posterior.
    """
    density = posterior.density
    grid = posterior.grid
    tol = rel_threshold * float(density.max())
    groups = _merged_runs(density, tol)

    def midpoint(start, length):
        return _wrap_angle(grid.points[start] + 0.5 * (length - 1) * grid.weight)

    peaks = []
    if len(groups) == 1:
        value, start, length = groups[0]
        peaks.append((midpoint(start, length), value))
    else:
        n_groups = len(groups)
        for i, (value, start, length) in enumerate(groups):
            prev_value = groups[(i - 1) % n_groups][0]
            next_value = groups[(i + 1) % n_groups][0]
            if value > prev_value and value > next_value and value > tol:
                peaks.append((midpoint(start, length), value))
    peaks.sort(key=lambda pair: pair[0])
    posterior.peaks = peaks
    return len(peaks)


def circular_summary(posterior: PhasePosterior):
    """Circular mean and circular standard deviation of the posterior.

    Uses the resultant z = sum_k p_k e^{i phi_k} weight: mean = arg z,
    std = sqrt(-2 ln |z|).  A resultant of zero length (e.g. a uniform
    posterior) has no mean and raises
    :class:`UndefinedCircularMeanError`.
    """
    z = posterior.grid.integrate(posterior.density * np.exp(1j * posterior.grid.points))
    resultant = float(np.abs(z))
    if resultant < RESULTANT_TOL:
        raise UndefinedCircularMeanError(
            f"circular resultant length {resultant} is numerically zero; "
            "the circular mean is undefined")
    mean = float(np.angle(z))
    std = math.sqrt(-2.0 * math.log(min(resultant, 1.0)))
    return mean, std


def outcome_distribution(state: StateCoefficients, phi: float,
                         geometry: InterferometerGeometry = DEFAULT_GEOMETRY
                         ) -> np.ndarray:
    """Probabilities of all N+1 outcomes at one phase, ordered by n_c."""
    phi = float(_check_phase(phi))
    s11, s12, s21, s22 = scattering_entries(np.array([phi]), geometry)
    amps = _kernels.state_amplitudes(state.coeffs, s11, s12, s21, s22)
    return _clamp_probs(np.abs(amps[:, 0]) ** 2)


def _posterior_from_log(log_likelihood: np.ndarray, grid: PhaseGrid,
                        outcome: Outcome) -> PhasePosterior:
    peak = log_likelihood.max()
    if not np.isfinite(peak):
        raise ZeroProbabilityOutcomeError(
            "recorded outcomes have zero joint probability on the whole grid")
    density = np.exp(log_likelihood - peak)
    return posterior_density(density, grid, outcome=outcome)


def simulate_sequence(state: StateCoefficients,
                      geometry: InterferometerGeometry = DEFAULT_GEOMETRY,
                      true_phase: float = 0.0,
                      shots: int = 1,
                      seed: int = 0,
                      grid_size: int = DEFAULT_GRID_SIZE,
                      keep_history: bool = False) -> SimulationResult:
    """Draw i.i.d. outcomes at a fixed phase and track the running posterior.

    Outcomes are sampled from P(m | true_phase) with a seeded generator,
    so a fixed seed reproduces the record bit-for-bit.  The running
    posterior multiplies likelihood rows in log space and renormalizes
    after each shot.  By default only the final posterior is returned;
    ``keep_history=True`` keeps one posterior per shot.

    Returns
    -------
    SimulationResult
        ``record`` holds the drawn outcomes, ``posteriors`` the posterior
        sequence (length ``shots`` with history, else 1).
    """
    if int(shots) != shots or shots < 1:
        raise ValueError(f"shots must be a positive integer, got {shots!r}")
    shots = int(shots)
    true_phase = float(_check_phase(true_phase))

    pmf = outcome_distribution(state, true_phase, geometry)
    pmf = pmf / pmf.sum()
    rng = np.random.default_rng(seed)
    draws = rng.choice(state.n + 1, size=shots, p=pmf)

    table = likelihood_table(state, geometry, grid_size)
    with np.errstate(divide="ignore"):
        log_rows = np.log(table.probs)

    outcomes = [Outcome(int(n_c), state.n - int(n_c)) for n_c in draws]
    log_likelihood = np.zeros(table.grid.size)
    posteriors = []
    for shot, n_c in enumerate(draws):
        log_likelihood = log_likelihood + log_rows[n_c]
        if keep_history or shot == shots - 1:
            posteriors.append(_posterior_from_log(log_likelihood, table.grid,
                                                  outcomes[shot]))
    record = MeasurementRecord(true_phase=true_phase, seed=int(seed),
                               outcomes=outcomes)
    return SimulationResult(record=record, posteriors=posteriors)
