"""Two-port interferometer optics: scattering matrix and outcome probabilities.

The device maps the two input ports (a, b) onto the two output ports
(c, d) through a phase-dependent 2x2 unitary.  Input states are
coefficient vectors over the photon-number basis |n_a, (N-n)_b> with
fixed total photon number N; measurement outcomes are the photon counts
(n_c, n_d) at the outputs.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .grid import DEFAULT_GRID_SIZE, PhaseGrid

# probabilities below this are treated as exact zeros (keeps logs clean
# of subnormal noise downstream)
PROB_FLOOR = 1e-300
NORM_TOL = 1e-12
UNITARITY_TOL = 1e-12

_SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
_SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)


@dataclass(frozen=True)
class InterferometerGeometry:
    """Dimensionless optical path phases k*L of the two interferometer arms."""

    kl1: float = 0.0
    kl2: float = 0.0

    def __post_init__(self):
        for name in ("kl1", "kl2"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"geometry phase {name} must be finite, got {value}")
            object.__setattr__(self, name, value)


DEFAULT_GEOMETRY = InterferometerGeometry()


@dataclass(frozen=True)
class Outcome:
    """Photon counts (n_c, n_d) registered at the two output ports."""

    n_c: int
    n_d: int

    def __post_init__(self):
        for name in ("n_c", "n_d"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise ValueError(f"photon count {name} must be a non-negative "
                                 f"integer, got {value!r}")
            object.__setattr__(self, name, int(value))

    @property
    def total(self) -> int:
        return self.n_c + self.n_d


@dataclass(eq=False)
class ScatteringMatrix:
    """2x2 unitary relating input-mode to output-mode operators at one phase."""

    entries: np.ndarray
    phase: float

    def unitarity_defect(self) -> float:
        """Max entrywise deviation of S^dagger S from the identity."""
        gram = self.entries.conj().T @ self.entries
        return float(np.abs(gram - np.eye(2)).max())


@dataclass(eq=False)
class StateCoefficients:
    """Unit-norm complex amplitudes c_0..c_N over the basis |n_a, (N-n)_b>."""

    coeffs: np.ndarray
    label: str = "custom"

    def __post_init__(self):
        coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=np.complex128))
        if coeffs.ndim != 1 or coeffs.size < 1:
            raise ValueError("coefficients must be a non-empty 1-D array")
        norm_sq = float(np.sum(np.abs(coeffs) ** 2))
        if not math.isfinite(norm_sq) or abs(norm_sq - 1.0) > NORM_TOL:
            raise ValueError(f"coefficients must have unit norm within {NORM_TOL}; "
                             f"got sum |c_n|^2 = {norm_sq!r}")
        self.coeffs = coeffs

    @property
    def n(self) -> int:
        """Total photon number N."""
        return self.coeffs.size - 1


def fock_state(n: int) -> StateCoefficients:
    """All N photons in port a: c_N = 1."""
    n = _check_photon_number(n, minimum=0)
    coeffs = np.zeros(n + 1, dtype=np.complex128)
    coeffs[n] = 1.0
    return StateCoefficients(coeffs, label="fock")


def noon_state(n: int) -> StateCoefficients:
    """Equal superposition of all photons in a and all in b: c_0 = c_N = 1/sqrt(2)."""
    n = _check_photon_number(n, minimum=1)
    coeffs = np.zeros(n + 1, dtype=np.complex128)
    coeffs[0] = coeffs[n] = 1.0 / math.sqrt(2.0)
    return StateCoefficients(coeffs, label="noon")


def _check_photon_number(n, minimum=0) -> int:
    if int(n) != n or n < minimum:
        raise ValueError(f"photon number must be an integer >= {minimum}, got {n!r}")
    return int(n)


def _check_phase(phi) -> np.ndarray:
    phi = np.asarray(phi, dtype=np.float64)
    if not np.all(np.isfinite(phi)):
        raise ValueError("phase values must be finite")
    return phi


def scattering_entries(phi, geometry: InterferometerGeometry = DEFAULT_GEOMETRY):
    """Entries (s11, s12, s21, s22) of the device unitary, vectorized over phi.

    The matrix is u*sigma_z + v*sigma_x with
    u = (e^{i(phi+kl1)} - e^{i kl2})/2 and v = -i(e^{i(phi+kl1)} + e^{i kl2})/2,
    i.e. rows/columns ordered (port a|c, port b|d).
    """
    phi = _check_phase(phi)
    upper = np.exp(1j * (phi + geometry.kl1))
    lower = np.exp(1j * geometry.kl2)
    u = 0.5 * (upper - lower)
    v = -0.5j * (upper + lower)
    return u, v, v, -u


def build_scattering_matrix(phi: float,
                            geometry: InterferometerGeometry = DEFAULT_GEOMETRY
                            ) -> ScatteringMatrix:
    """Device unitary at a single phase value.

    Raises ``ValueError`` for non-finite input and checks the unitarity
    invariant (defect below 1e-12) before returning.
    """
    phi = float(_check_phase(phi))
    s11, s12, s21, s22 = scattering_entries(phi, geometry)
    matrix = ScatteringMatrix(
        entries=np.array([[s11, s12], [s21, s22]], dtype=np.complex128),
        phase=phi,
    )
    defect = matrix.unitarity_defect()
    if defect > UNITARITY_TOL:  # pragma: no cover - construction guarantees this
        raise ValueError(f"scattering matrix unitarity defect {defect} exceeds "
                         f"{UNITARITY_TOL}")
    return matrix


def _clamp_probs(p: np.ndarray) -> np.ndarray:
    p[p < PROB_FLOOR] = 0.0
    np.clip(p, 0.0, 1.0, out=p)
    return p


def fock_outcome_prob(n_total: int, outcome: Outcome, phi):
    """Outcome probability for the all-photons-in-port-a input, closed form.

    P(n_c, n_d | phi) = [N!/(n_c! n_d!)] sin^{2 n_c}(phi/2) cos^{2 n_d}(phi/2)
    when n_c + n_d = N, else 0.  Accepts scalar or array phi.
    """
    n_total = _check_photon_number(n_total, minimum=0)
    phi = _check_phase(phi)
    if outcome.total != n_total:
        return np.zeros_like(phi) if phi.ndim else 0.0
    half = 0.5 * phi
    p = float(math.comb(n_total, outcome.n_c)) \
        * np.sin(half) ** (2 * outcome.n_c) \
        * np.cos(half) ** (2 * outcome.n_d)
    p = _clamp_probs(np.atleast_1d(np.asarray(p, dtype=np.float64)))
    return p if phi.ndim else float(p[0])


def noon_outcome_prob(n_total: int, outcome: Outcome, phi):
    """Outcome probability for the two-sided superposition input, closed form.

    P(n_c, n_d | phi) = (1/2) [N!/(n_c! n_d!)] *
        [sin^{n_c}(phi/2) cos^{n_d}(phi/2)
         + (-1)^{n_c} sin^{n_d}(phi/2) cos^{n_c}(phi/2)]^2
    when n_c + n_d = N, else 0.  Accepts scalar or array phi.
    """
    n_total = _check_photon_number(n_total, minimum=1)
    phi = _check_phase(phi)
    if outcome.total != n_total:
        return np.zeros_like(phi) if phi.ndim else 0.0
    s, c = np.sin(0.5 * phi), np.cos(0.5 * phi)
    bracket = (s ** outcome.n_c * c ** outcome.n_d
               + (-1) ** outcome.n_c * s ** outcome.n_d * c ** outcome.n_c)
    p = 0.5 * float(math.comb(n_total, outcome.n_c)) * bracket ** 2
    p = _clamp_probs(np.atleast_1d(np.asarray(p, dtype=np.float64)))
    return p if phi.ndim else float(p[0])


def transition_amplitude(smatrix: ScatteringMatrix,
                         n_a: int, n_b: int, n_c: int, n_d: int) -> complex:
    """Amplitude <n_c, n_d| applied to |n_a, n_b> under the device unitary.

    Photon number is conserved; ``n_a + n_b != n_c + n_d`` is a domain
    error.  Evaluated as a finite sum over transfer partitions with
    log-gamma weights, stable up to at least 40 photons.
    """
    counts = {"n_a": n_a, "n_b": n_b, "n_c": n_c, "n_d": n_d}
    for name, value in counts.items():
        if int(value) != value or value < 0:
            raise ValueError(f"photon count {name} must be a non-negative "
                             f"integer, got {value!r}")
    n_a, n_b, n_c, n_d = (int(v) for v in (n_a, n_b, n_c, n_d))
    if n_a + n_b != n_c + n_d:
        raise ValueError(f"photon number mismatch: input {n_a}+{n_b} != "
                         f"output {n_c}+{n_d}")
    s = smatrix.entries
    amp = 0.0 + 0.0j
    for j in range(max(0, n_c - n_b), min(n_a, n_c) + 1):
        weight = _kernels.partition_weight(n_a, n_b, n_c, j)
        amp += (s[0, 0] ** j * s[1, 0] ** (n_a - j)
                * s[0, 1] ** (n_c - j) * s[1, 1] ** (n_b - n_c + j)) * weight
    return complex(amp)


def state_outcome_prob(state: StateCoefficients, phi: float,
                       geometry: InterferometerGeometry = DEFAULT_GEOMETRY,
                       outcome: Outcome = None) -> float:
    """Probability of one outcome for an arbitrary input state at one phase.

    Amplitudes of the N+1 basis inputs are summed coherently before
    squaring.  The outcome must carry the state's total photon number.
    """
    if outcome is None:
        raise ValueError("an outcome is required")
    if outcome.total != state.n:
        raise ValueError(f"outcome counts {outcome.n_c}+{outcome.n_d} do not "
                         f"match the state photon number {state.n}")
    phi = float(_check_phase(phi))
    s11, s12, s21, s22 = scattering_entries(np.array([phi]), geometry)
    amps = _kernels.state_amplitudes(state.coeffs, s11, s12, s21, s22)
    p = np.abs(amps[outcome.n_c, 0]) ** 2
    return float(_clamp_probs(np.array([p]))[0])


@dataclass(eq=False)
class LikelihoodTable:
    """P(m | phi_k) on a phase grid, one row per outcome.

    ``outcomes`` lists the row labels: ``Outcome`` objects for single-shot
    tables, tuples of repeat counts for compound (repeated-measurement)
    tables.
    """

    grid: PhaseGrid
    probs: np.ndarray
    outcomes: list
    state_label: str
    n_total: int

    @property
    def outcome_count(self) -> int:
        return self.probs.shape[0]

    def row_for(self, outcome: Outcome) -> np.ndarray:
        if outcome.total != self.n_total:
            raise ValueError(f"outcome counts {outcome.n_c}+{outcome.n_d} do not "
                             f"match the table photon number {self.n_total}")
        return self.probs[outcome.n_c]


def likelihood_table(state: StateCoefficients,
                     geometry: InterferometerGeometry = DEFAULT_GEOMETRY,
                     grid_size: int = DEFAULT_GRID_SIZE) -> LikelihoodTable:
    """Tabulate P(m | phi_k) for every outcome on a uniform phase grid.

    Rows are ordered by n_c = 0..N; columns follow the grid points.  Every
    column sums to 1 (photon-number projectors are complete and the device
    unitary).
    """
    grid = PhaseGrid(grid_size)
    s11, s12, s21, s22 = scattering_entries(grid.points, geometry)
    amps = _kernels.state_amplitudes(state.coeffs, s11, s12, s21, s22)
    probs = _clamp_probs(np.abs(amps) ** 2)
    outcomes = [Outcome(n_c, state.n - n_c) for n_c in range(state.n + 1)]
    return LikelihoodTable(grid=grid, probs=probs, outcomes=outcomes,
                           state_label=state.label, n_total=state.n)
