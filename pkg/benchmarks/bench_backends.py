#!/usr/bin/env python3
"""Timing comparison of the jit and pure-numpy amplitude kernels.

Runs the two hot kernels (per-state outcome amplitudes and the full
basis amplitude tensor) on identical inputs and reports per-call wall
time and the jit speedup.  A correctness cross-check (max absolute
difference between backends) is printed alongside.

Usage:
    python benchmarks/bench_backends.py
    python benchmarks/bench_backends.py --photons 5,15,25 --grid 8192 --repeats 5
"""

import argparse
import time

import numpy as np

from mzfidelity import PhaseGrid
from mzfidelity._kernels import (amplitude_tensor_numba, amplitude_tensor_numpy,
                                 state_amplitudes_numba, state_amplitudes_numpy)
from mzfidelity.optics import scattering_entries


def best_of(func, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = func()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--photons", default="5,10,15,20,25",
                        help="comma-separated photon numbers")
    parser.add_argument("--grid", type=int, default=4096)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    if state_amplitudes_numba is None:
        raise SystemExit("numba is not available; nothing to compare")

    photon_numbers = [int(x) for x in args.photons.split(",")]
    grid = PhaseGrid(args.grid)
    entries = scattering_entries(grid.points)
    rng = np.random.default_rng(0)

    # warm up the jit compilation outside the timed region
    state_amplitudes_numba(np.array([1.0 + 0j]), *entries)
    amplitude_tensor_numba(*entries, 1)

    header = (f"{'N':>3} {'kernel':<8} {'numba [ms]':>11} {'numpy [ms]':>11} "
              f"{'speedup':>8} {'max diff':>10}")
    print(f"grid size {args.grid}, best of {args.repeats}")
    print(header)
    print("-" * len(header))
    for n in photon_numbers:
        coeffs = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
        coeffs /= np.linalg.norm(coeffs)

        t_nb, a_nb = best_of(lambda: state_amplitudes_numba(coeffs, *entries),
                             args.repeats)
        t_np, a_np = best_of(lambda: state_amplitudes_numpy(coeffs, *entries),
                             args.repeats)
        diff = float(np.abs(a_nb - a_np).max())
        print(f"{n:>3} {'state':<8} {t_nb * 1e3:>11.2f} {t_np * 1e3:>11.2f} "
              f"{t_np / t_nb:>7.1f}x {diff:>10.1e}")

        t_nb, t_full_nb = best_of(lambda: amplitude_tensor_numba(*entries, n),
                                  args.repeats)
        t_np, t_full_np = best_of(lambda: amplitude_tensor_numpy(*entries, n),
                                  args.repeats)
        diff = float(np.abs(t_full_nb - t_full_np).max())
        print(f"{n:>3} {'tensor':<8} {t_nb * 1e3:>11.2f} {t_np * 1e3:>11.2f} "
              f"{t_np / t_nb:>7.1f}x {diff:>10.1e}")


if __name__ == "__main__":
    main()
