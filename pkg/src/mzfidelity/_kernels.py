"""Hot numeric kernels: photon-number transition amplitudes of a two-port device.

Both kernels expand the action of a 2x2 mode transformation S on
photon-number states.  For ``n_a`` photons in port 1 and ``n_b = N - n_a``
in port 2, the amplitude to count ``n_c`` photons in output 1 and
``n_d = N - n_c`` in output 2 is

    A = sum_j  w_j * S11^j * S21^(n_a-j) * S12^(n_c-j) * S22^(n_b-n_c+j),

    w_j = sqrt(n_c! n_d! / (n_a! n_b!)) * C(n_a, j) * C(n_b, n_c - j),

with j running over max(0, n_c-n_b) .. min(n_a, n_c).  The weights are
precomputed once per photon number with exact integer arithmetic
(binomials and the factorial ratio never materialize as factorials), so
they are correct to the last bit or two even at 40 photons; inside the
sum the factor products cancel, so weight accuracy bounds the accuracy
of the whole amplitude.

Two implementations are provided: a numba ``@njit`` version and a pure
numpy fallback.  Selection happens at import time from the environment
variable ``MZFIDELITY_BACKEND`` ("numba" or "numpy", default "numba"
when numba is importable).  ``benchmarks/bench_backends.py`` compares
the two.
"""

import math
import os
import warnings
from fractions import Fraction
from functools import lru_cache

import numpy as np

BACKEND_ENV_VAR = "MZFIDELITY_BACKEND"

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


def partition_weight(n_a: int, n_b: int, n_c: int, j: int) -> float:
    """Exact-arithmetic transfer weight for one partition term."""
    n_d = n_a + n_b - n_c
    ratio = Fraction(math.factorial(n_c) * math.factorial(n_d),
                     math.factorial(n_a) * math.factorial(n_b))
    return math.comb(n_a, j) * math.comb(n_b, n_c - j) * math.sqrt(ratio)


@lru_cache(maxsize=None)
def _partition_tables(n_total: int):
    """Flattened (n_a, n_c, j, weight) arrays of all transfer partitions."""
    na_idx, nc_idx, j_idx, weights = [], [], [], []
    for n_a in range(n_total + 1):
        n_b = n_total - n_a
        for n_c in range(n_total + 1):
            for j in range(max(0, n_c - n_b), min(n_a, n_c) + 1):
                na_idx.append(n_a)
                nc_idx.append(n_c)
                j_idx.append(j)
                weights.append(partition_weight(n_a, n_b, n_c, j))
    return (np.asarray(na_idx, dtype=np.int64),
            np.asarray(nc_idx, dtype=np.int64),
            np.asarray(j_idx, dtype=np.int64),
            np.asarray(weights, dtype=np.float64))


# ---------------------------------------------------------------------------
# pure-numpy fallback
# ---------------------------------------------------------------------------

def _cmul(a, b):
    # numpy's SIMD complex multiply may contract with FMA, which makes it
    # non-commutative at the bit level; that would leave last-ulp residue
    # where symmetric +/- amplitude pairs should cancel exactly.  Separate
    # real ufunc calls are single-rounded and bitwise commutative.
    ar, ai = a.real, a.imag
    br, bi = b.real, b.imag
    return (ar * br - ai * bi) + 1j * (ar * bi + ai * br)


def _pow_tables(s11, s12, s21, s22, n_total):
    # cumulative products, not np.power: complex ** int goes through
    # exp/log and is not exact even for exponent 1
    def powers(s):
        table = np.empty((n_total + 1, s.shape[0]), dtype=np.complex128)
        table[0] = 1.0
        for j in range(1, n_total + 1):
            table[j] = _cmul(table[j - 1], s)
        return table

    return powers(s11), powers(s12), powers(s21), powers(s22)


def _gathered_terms(pows, n_total, na, nc, j):
    # pow factors multiplied first, weight applied by the caller last:
    # symmetric +/- term pairs (equal weights, opposite factor products)
    # then cancel exactly, so outcomes that vanish identically come out
    # as true zeros
    p11, p12, p21, p22 = pows
    nb = n_total - na
    return _cmul(_cmul(p11[j], p21[na - j]), _cmul(p12[nc - j], p22[nb - nc + j]))


def state_amplitudes_numpy(coeffs, s11, s12, s21, s22):
    """Outcome amplitudes of a coefficient vector, numpy implementation.

    Returns a complex array of shape ``(N+1, K)``: row ``n_c`` holds the
    coherent sum over basis inputs, column ``k`` corresponds to the k-th
    entry of the scattering-element arrays.
    """
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    n_total = coeffs.shape[0] - 1
    na, nc, j, w = _partition_tables(n_total)
    keep = coeffs[na] != 0
    na, nc, j, w = na[keep], nc[keep], j[keep], w[keep]
    pows = _pow_tables(s11, s12, s21, s22, n_total)
    terms = _gathered_terms(pows, n_total, na, nc, j) * (coeffs[na] * w)[:, None]
    amps = np.zeros((n_total + 1, s11.shape[0]), dtype=np.complex128)
    np.add.at(amps, nc, terms)
    return amps


def amplitude_tensor_numpy(s11, s12, s21, s22, n_total):
    """Amplitude tensor ``A[n_a, n_c, k]`` over all basis inputs, numpy path."""
    na, nc, j, w = _partition_tables(n_total)
    pows = _pow_tables(s11, s12, s21, s22, n_total)
    terms = _gathered_terms(pows, n_total, na, nc, j) * w[:, None]
    tensor = np.zeros((n_total + 1, n_total + 1, s11.shape[0]), dtype=np.complex128)
    np.add.at(tensor, (na, nc), terms)
    return tensor


# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------

if numba is not None:

    @numba.njit(cache=True)
    def _pow_tables_jit(s11, s12, s21, s22, n_total):
        k_size = s11.shape[0]
        p11 = np.empty((n_total + 1, k_size), np.complex128)
        p12 = np.empty((n_total + 1, k_size), np.complex128)
        p21 = np.empty((n_total + 1, k_size), np.complex128)
        p22 = np.empty((n_total + 1, k_size), np.complex128)
        for k in range(k_size):
            p11[0, k] = 1.0
            p12[0, k] = 1.0
            p21[0, k] = 1.0
            p22[0, k] = 1.0
        for j in range(1, n_total + 1):
            for k in range(k_size):
                p11[j, k] = p11[j - 1, k] * s11[k]
                p12[j, k] = p12[j - 1, k] * s12[k]
                p21[j, k] = p21[j - 1, k] * s21[k]
                p22[j, k] = p22[j - 1, k] * s22[k]
        return p11, p12, p21, p22

    @numba.njit(cache=True)
    def _state_amplitudes_jit(coeffs, s11, s12, s21, s22, na_idx, nc_idx,
                              j_idx, weights):
        n_total = coeffs.shape[0] - 1
        k_size = s11.shape[0]
        p11, p12, p21, p22 = _pow_tables_jit(s11, s12, s21, s22, n_total)
        amps = np.zeros((n_total + 1, k_size), np.complex128)
        for t in range(na_idx.shape[0]):
            n_a = na_idx[t]
            c = coeffs[n_a]
            if c.real == 0.0 and c.imag == 0.0:
                continue
            n_c = nc_idx[t]
            j = j_idx[t]
            n_b = n_total - n_a
            cw = c * weights[t]
            # pow factors first, scale last: keeps exact +/- cancellation
            # for outcomes that vanish identically
            for k in range(k_size):
                amps[n_c, k] += (p11[j, k] * p21[n_a - j, k]
                                 * p12[n_c - j, k]
                                 * p22[n_b - n_c + j, k]) * cw
        return amps

    @numba.njit(cache=True)
    def _amplitude_tensor_jit(s11, s12, s21, s22, n_total, na_idx, nc_idx,
                              j_idx, weights):
        k_size = s11.shape[0]
        p11, p12, p21, p22 = _pow_tables_jit(s11, s12, s21, s22, n_total)
        tensor = np.zeros((n_total + 1, n_total + 1, k_size), np.complex128)
        for t in range(na_idx.shape[0]):
            n_a = na_idx[t]
            n_c = nc_idx[t]
            j = j_idx[t]
            n_b = n_total - n_a
            w = weights[t]
            for k in range(k_size):
                tensor[n_a, n_c, k] += (p11[j, k] * p21[n_a - j, k]
                                        * p12[n_c - j, k]
                                        * p22[n_b - n_c + j, k]) * w
        return tensor

    def state_amplitudes_numba(coeffs, s11, s12, s21, s22):
        """Outcome amplitudes of a coefficient vector, jit implementation."""
        coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
        tables = _partition_tables(coeffs.shape[0] - 1)
        return _state_amplitudes_jit(
            coeffs,
            np.ascontiguousarray(s11, dtype=np.complex128),
            np.ascontiguousarray(s12, dtype=np.complex128),
            np.ascontiguousarray(s21, dtype=np.complex128),
            np.ascontiguousarray(s22, dtype=np.complex128),
            *tables,
        )

    def amplitude_tensor_numba(s11, s12, s21, s22, n_total):
        """Amplitude tensor ``A[n_a, n_c, k]``, jit implementation."""
        tables = _partition_tables(int(n_total))
        return _amplitude_tensor_jit(
            np.ascontiguousarray(s11, dtype=np.complex128),
            np.ascontiguousarray(s12, dtype=np.complex128),
            np.ascontiguousarray(s21, dtype=np.complex128),
            np.ascontiguousarray(s22, dtype=np.complex128),
            int(n_total),
            *tables,
        )

else:  # pragma: no cover
    state_amplitudes_numba = None
    amplitude_tensor_numba = None


# ---------------------------------------------------------------------------
# backend selection
# ---------------------------------------------------------------------------

def _select_backend() -> str:
    requested = os.environ.get(BACKEND_ENV_VAR, "numba").strip().lower()
    if requested not in ("numba", "numpy"):
        raise ValueError(
            f"{BACKEND_ENV_VAR} must be 'numba' or 'numpy', got {requested!r}")
    if requested == "numba" and numba is None:  # pragma: no cover
        warnings.warn("numba is not installed; falling back to the numpy kernels",
                      RuntimeWarning, stacklevel=2)
        return "numpy"
    return requested


_ACTIVE_BACKEND = _select_backend()

if _ACTIVE_BACKEND == "numba":
    state_amplitudes = state_amplitudes_numba
    amplitude_tensor = amplitude_tensor_numba
else:
    state_amplitudes = state_amplitudes_numpy
    amplitude_tensor = amplitude_tensor_numpy


def active_backend() -> str:
    """Name of the kernel backend selected at import time."""
    return _ACTIVE_BACKEND
