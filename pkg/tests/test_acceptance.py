"""Acceptance suite: one test per exit criterion, at the stated tolerances.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL
line per criterion.

Criterion 5 is split into three labelled parts.  Part 5c (the claim that
the two-sided-superposition information curve rises strictly with photon
number) is genuinely false for this device: at 2 photons every outcome
probability is constant in phase, so that input carries exactly 0 bits,
below the 1-photon value of 0.4427 bits, and the even/odd alternation
persists to 25 photons.  The assertion is kept as stated and is expected
to fail; every other criterion passes.
"""

import math
import time

import numpy as np
import pytest

from mzfidelity import (Outcome, OptimizerConfig, StateCoefficients,
                        count_peaks, error_propagation_sensitivity,
                        fidelity_sweep, fock_outcome_prob, fock_state,
                        likelihood_table, mutual_information, noon_outcome_prob,
                        noon_state, optimize_input_state, posterior_for_outcome,
                        repeated_mutual_information, simulate_sequence,
                        standard_limit)

H_SINGLE_PHOTON = 1.0 / math.log(2.0) - 1.0
N_MAX = 25
GRID = 8192


def _report(criterion: str, passed: bool, detail: str):
    print(f"\nACCEPTANCE {criterion}: {'PASS' if passed else 'FAIL'} - {detail}")


@pytest.fixture(scope="module")
def sweeps():
    start = time.perf_counter()
    fock = fidelity_sweep("fock", N_MAX, GRID)
    noon = fidelity_sweep("noon", N_MAX, GRID)
    return fock, noon, time.perf_counter() - start


def test_criterion_01_closed_form_equivalence():
    # engine probabilities match both closed forms within 1e-10,
    # all N <= 25, all outcomes, 256 phase points, in under 10 s
    start = time.perf_counter()
    grid_points = None
    worst = 0.0
    for n in range(1, N_MAX + 1):
        fock_table = likelihood_table(fock_state(n), grid_size=256)
        noon_table = likelihood_table(noon_state(n), grid_size=256)
        grid_points = fock_table.grid.points
        for n_c in range(n + 1):
            outcome = Outcome(n_c, n - n_c)
            worst = max(
                worst,
                float(np.abs(fock_table.probs[n_c]
                             - fock_outcome_prob(n, outcome, grid_points)).max()),
                float(np.abs(noon_table.probs[n_c]
                             - noon_outcome_prob(n, outcome, grid_points)).max()),
            )
    elapsed = time.perf_counter() - start
    _report("1", worst < 1e-10 and elapsed < 10.0,
            f"max |engine - closed form| = {worst:.3e} in {elapsed:.2f}s")
    assert worst < 1e-10
    assert elapsed < 10.0


def test_criterion_02_completeness():
    # sum_m P(m|phi) = 1 within 1e-12 for 100 random states per N
    rng = np.random.default_rng(20260810)
    worst = 0.0
    for n in range(1, N_MAX + 1):
        for _ in range(100):
            raw = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
            state = StateCoefficients(raw / np.linalg.norm(raw))
            table = likelihood_table(state, grid_size=64)
            worst = max(worst, float(np.abs(table.probs.sum(axis=0) - 1.0).max()))
    _report("2", worst < 1e-12, f"max |sum_m P - 1| = {worst:.3e}")
    assert worst < 1e-12


def test_criterion_03_single_photon_value(sweeps):
    fock, _, _ = sweeps
    value = fock[0].h_bits
    error = abs(value - H_SINGLE_PHOTON)
    _report("3", error < 1e-6,
            f"H(1 photon) = {value:.9f} bits vs 1/ln2 - 1 (err {error:.2e})")
    assert error < 1e-6


def test_criterion_04_single_photon_families_agree(sweeps):
    fock, noon, _ = sweeps
    diff = abs(noon[0].h_bits - fock[0].h_bits)
    _report("4", diff < 1e-9, f"|H_noon(1) - H_fock(1)| = {diff:.3e}")
    assert diff < 1e-9


def test_criterion_05a_family_ordering(sweeps):
    fock, noon, elapsed = sweeps
    ordered = all(f.h_bits > n.h_bits for f, n in zip(fock[1:], noon[1:]))
    _report("5a", ordered and elapsed < 60.0,
            f"H_fock(N) > H_noon(N) for N in 2..25 ({elapsed:.1f}s at grid {GRID})")
    assert ordered
    assert elapsed < 60.0


def test_criterion_05b_fock_monotone(sweeps):
    fock, _, _ = sweeps
    values = [r.h_bits for r in fock]
    increasing = all(b > a for a, b in zip(values, values[1:]))
    _report("5b", increasing, "one-port input: H strictly increasing in N")
    assert increasing


def test_criterion_05c_noon_monotone(sweeps):
    # stated criterion; genuinely false for photon counting on this device:
    # at N=2 every outcome probability is constant in phase (the coincidence
    # outcome vanishes identically and the two bunched outcomes are 1/2 each),
    # so H(2) = 0 bits < H(1) = 0.4427 bits, and the even/odd dip persists
    _, noon, _ = sweeps
    values = [r.h_bits for r in noon]
    increasing = all(b > a for a, b in zip(values, values[1:]))
    _report("5c", increasing,
            f"two-port-superposition monotonicity (H(1)={values[0]:.4f}, "
            f"H(2)={values[1]:.4g}, H(3)={values[2]:.4f}, ...)")
    assert increasing, (
        "the two-sided superposition's information is not monotone in N: "
        f"H(2) = {values[1]:.6g} bits < H(1) = {values[0]:.6f} bits because "
        "all 2-photon outcome probabilities are phase-independent")


def test_criterion_06_peak_count_ranges():
    fock_counts, noon_counts = set(), set()
    for n in range(1, N_MAX + 1):
        fock_table = likelihood_table(fock_state(n), grid_size=GRID)
        noon_table = likelihood_table(noon_state(n), grid_size=GRID)
        for n_c in range(n + 1):
            outcome = Outcome(n_c, n - n_c)
            fock_counts.add(count_peaks(posterior_for_outcome(fock_table, outcome)))
            if noon_table.probs[n_c].sum() > 0:
                noon_counts.add(count_peaks(posterior_for_outcome(noon_table, outcome)))
    table = likelihood_table(fock_state(25), grid_size=GRID)
    post = posterior_for_outcome(table, Outcome(4, 21))
    n_peaks = count_peaks(post)
    locations = sorted(loc for loc, _ in post.peaks)
    expected = 2.0 * math.atan(math.sqrt(4.0 / 21.0))
    step = 2.0 * np.pi / GRID
    located = (n_peaks == 2
               and abs(locations[0] + expected) <= step
               and abs(locations[1] - expected) <= step)
    ok = fock_counts <= {1, 2} and noon_counts <= {1, 2, 3, 4} and located
    _report("6", ok, f"one-port counts {sorted(fock_counts)}, superposition "
                     f"counts {sorted(noon_counts)}, (4,21) peaks at "
                     f"+-{locations[1]:.6f} vs +-{expected:.6f}")
    assert fock_counts <= {1, 2}
    assert noon_counts <= {1, 2, 3, 4}
    assert located


def test_criterion_07_repeated_single_photon_equivalence(sweeps):
    fock, _, _ = sweeps
    single = likelihood_table(fock_state(1), grid_size=GRID)
    worst = 0.0
    for n in range(1, N_MAX + 1):
        compound = repeated_mutual_information(single, n)
        worst = max(worst, abs(compound.h_bits - fock[n - 1].h_bits))
    _report("7", worst < 1e-9,
            f"max |H(1 photon x N) - H(N-photon)| = {worst:.3e}")
    assert worst < 1e-9


def test_criterion_08_error_propagation_standard_limit():
    worst = 0.0
    for n in (1, 4, 16, 25):
        estimate = error_propagation_sensitivity(
            fock_state(n), observable="n_c", working_point=np.pi / 2)
        worst = max(worst, abs(estimate.delta_phi - standard_limit(n)))
    _report("8", worst < 1e-6, f"max |delta_phi - 1/sqrt(N)| = {worst:.3e}")
    assert worst < 1e-6


def test_criterion_09_grid_convergence(sweeps):
    fock, noon, _ = sweeps
    worst = 0.0
    for n in (1, 10, 25):
        for family, coarse in (("fock", fock[n - 1]), ("noon", noon[n - 1])):
            state = fock_state(n) if family == "fock" else noon_state(n)
            fine = mutual_information(likelihood_table(state, grid_size=2 * GRID))
            worst = max(worst, abs(coarse.h_bits - fine.h_bits))
    _report("9", worst < 1e-8, f"max |H(8192) - H(16384)| = {worst:.3e}")
    assert worst < 1e-8


def test_criterion_10_optimizer_never_below_benchmarks():
    config = OptimizerConfig(restarts=4, max_iterations=400, seed=20260810,
                             search_grid_size=2048, report_grid_size=GRID)
    start = time.perf_counter()
    worst_margin = np.inf
    for n in range(1, 7):
        result = optimize_input_state(n, config)
        floor = max(
            mutual_information(likelihood_table(fock_state(n), grid_size=GRID)).h_bits,
            mutual_information(likelihood_table(noon_state(n), grid_size=GRID)).h_bits)
        worst_margin = min(worst_margin, result.best_h_bits - floor)
    elapsed = time.perf_counter() - start
    ok = worst_margin >= -1e-6 and elapsed < 300.0
    _report("10", ok, f"min margin over benchmarks = {worst_margin:+.3e} "
                      f"in {elapsed:.1f}s")
    assert worst_margin >= -1e-6
    assert elapsed < 300.0


def test_criterion_11_determinism():
    sim_kwargs = dict(true_phase=0.9, shots=256, seed=77, grid_size=512)
    sim_a = simulate_sequence(fock_state(2), **sim_kwargs)
    sim_b = simulate_sequence(fock_state(2), **sim_kwargs)
    sim_ok = (sim_a.record.outcomes == sim_b.record.outcomes
              and np.array_equal(sim_a.final_posterior.density,
                                 sim_b.final_posterior.density))
    config = OptimizerConfig(restarts=3, max_iterations=150, seed=5,
                             search_grid_size=512, report_grid_size=1024)
    opt_a = optimize_input_state(2, config)
    opt_b = optimize_input_state(2, config)
    opt_ok = (opt_a.best_h_bits == opt_b.best_h_bits
              and np.array_equal(opt_a.best_state.coeffs, opt_b.best_state.coeffs)
              and opt_a.history == opt_b.history)
    _report("11", sim_ok and opt_ok,
            "simulate and optimize reproduce bit-exactly under a fixed seed")
    assert sim_ok
    assert opt_ok
