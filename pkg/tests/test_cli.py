"""End-to-end CLI behavior: formats, exit codes, manifests, determinism."""

import csv
import io
import json
import math

import numpy as np
import pytest

from mzfidelity.cli import main

H_SINGLE_PHOTON = 1.0 / math.log(2.0) - 1.0


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    reader = csv.reader(io.StringIO(text))
    records = list(reader)
    return records[0], records[1:]


# ---------------------------------------------------------------------------
# probs
# ---------------------------------------------------------------------------

def test_probs_single_photon(capsys):
    code, out, _ = run_cli(["probs", "--state", "fock", "--n", "1", "--grid", "8"],
                           capsys)
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["phi", "P(0,1)", "P(1,0)"]
    assert len(rows) == 8
    for row in rows:
        assert float(row[1]) + float(row[2]) == pytest.approx(1.0, abs=1e-11)
    # 12 significant digits, plain ASCII
    assert rows[0][0] == "-2.35619449019"


def test_probs_coincidence_column_is_zero(capsys):
    code, out, _ = run_cli(["probs", "--state", "noon", "--n", "2", "--grid", "8"],
                           capsys)
    assert code == 0
    header, rows = parse_csv(out)
    column = header.index("P(1,1)")
    assert all(row[column] == "0" for row in rows)


def test_probs_vacuum(capsys):
    code, out, _ = run_cli(["probs", "--state", "fock", "--n", "0", "--grid", "4"],
                           capsys)
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["phi", "P(0,0)"]
    assert all(row[1] == "1" for row in rows)


def test_probs_rejects_bad_photon_number(capsys):
    code, _, err = run_cli(["probs", "--state", "fock", "--n", "41"], capsys)
    assert code == 2
    assert "error" in err


def test_probs_rejects_bad_grid(capsys):
    code, _, _ = run_cli(["probs", "--state", "fock", "--n", "1", "--grid", "1"],
                         capsys)
    assert code == 2


# ---------------------------------------------------------------------------
# posterior
# ---------------------------------------------------------------------------

def test_posterior_two_peak_sidecar(tmp_path, capsys):
    out_path = tmp_path / "post.csv"
    code, _, _ = run_cli(["posterior", "--state", "fock", "--n", "25",
                          "--outcome", "4,21", "--grid", "4096",
                          "--out", str(out_path)], capsys)
    assert code == 0
    summary = json.loads((tmp_path / "post.csv.summary.json").read_text())
    assert summary["peak_count"] == 2
    locations = [p["phi"] for p in summary["peaks"]]
    assert locations == sorted(locations)
    expected = 2 * math.atan(math.sqrt(4 / 21))
    assert locations[1] == pytest.approx(expected, abs=2 * np.pi / 4096)
    # density column integrates to 1 under the grid rule
    header, rows = parse_csv(out_path.read_text())
    assert header == ["phi", "density"]
    density = np.array([float(r[1]) for r in rows])
    assert density.sum() * (2 * np.pi / 4096) == pytest.approx(1.0, abs=1e-10)


def test_posterior_superposition_has_more_ambiguity(tmp_path, capsys):
    out_path = tmp_path / "noon.csv"
    code, _, _ = run_cli(["posterior", "--state", "noon", "--n", "25",
                          "--outcome", "4,21", "--grid", "4096",
                          "--out", str(out_path)], capsys)
    assert code == 0
    summary = json.loads((tmp_path / "noon.csv.summary.json").read_text())
    assert summary["peak_count"] in (1, 2, 3, 4)
    assert summary["peak_count"] >= 2  # at least the one-port count


def test_posterior_single_photon_closed_form(capsys):
    code, out, _ = run_cli(["posterior", "--state", "fock", "--n", "1",
                            "--outcome", "0,1", "--grid", "512"], capsys)
    assert code == 0
    _, rows = parse_csv(out)
    for row in rows:
        phi, density = float(row[0]), float(row[1])
        assert density == pytest.approx(np.cos(phi / 2) ** 2 / np.pi, abs=1e-12)


def test_posterior_vacuum_has_no_circular_mean(tmp_path, capsys):
    # flat posterior: one whole-circle plateau, undefined mean reported as null
    out_path = tmp_path / "vac.csv"
    code, _, _ = run_cli(["posterior", "--state", "fock", "--n", "0",
                          "--outcome", "0,0", "--grid", "64",
                          "--out", str(out_path)], capsys)
    assert code == 0
    summary = json.loads((tmp_path / "vac.csv.summary.json").read_text())
    assert summary["circular_mean"] is None
    assert summary["circular_std"] is None
    assert summary["peak_count"] == 1


def test_posterior_impossible_outcome_exit_code(capsys):
    code, _, err = run_cli(["posterior", "--state", "noon", "--n", "2",
                            "--outcome", "1,1", "--grid", "64"], capsys)
    assert code == 3
    assert "zero-probability" in err


def test_posterior_outcome_inconsistent_with_n(capsys):
    code, _, _ = run_cli(["posterior", "--state", "fock", "--n", "2",
                          "--outcome", "1,0", "--grid", "64"], capsys)
    assert code == 2


# ---------------------------------------------------------------------------
# fidelity
# ---------------------------------------------------------------------------

def test_fidelity_single_photon_value(capsys):
    code, out, _ = run_cli(["fidelity", "--state", "fock", "--n", "1"], capsys)
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["state", "N", "H_bits"]
    assert rows == [["fock", "1", "0.442695040895"]]
    assert float(rows[0][2]) == pytest.approx(H_SINGLE_PHOTON, abs=1e-6)


def test_fidelity_sweep_ordering(capsys):
    code, out, _ = run_cli(["fidelity", "--sweep", "fock,noon", "--n-max", "4",
                            "--grid", "2048"], capsys)
    assert code == 0
    _, rows = parse_csv(out)
    assert len(rows) == 8
    values = {(r[0], int(r[1])): float(r[2]) for r in rows}
    for n in range(2, 5):
        assert values[("fock", n)] > values[("noon", n)]
    assert values[("noon", 1)] == pytest.approx(values[("fock", 1)], abs=1e-9)


def test_fidelity_requires_state_or_sweep(capsys):
    code, _, _ = run_cli(["fidelity"], capsys)
    assert code == 2


# ---------------------------------------------------------------------------
# optimize
# ---------------------------------------------------------------------------

OPT_ARGS = ["optimize", "--n", "2", "--seed", "7", "--restarts", "3",
            "--max-iter", "150", "--search-grid", "512", "--grid", "1024"]


def test_optimize_beats_benchmarks_and_repeats(capsys):
    code, out1, err = run_cli(OPT_ARGS, capsys)
    assert code == 0
    assert "restart" in err  # progress goes to stderr
    payload = json.loads(out1)
    fock_h, noon_h = 0.696668206, 0.0
    assert payload["best_h_bits"] >= max(fock_h, noon_h) - 1e-6
    assert payload["n_photons"] == 2
    assert len(payload["history"]) == 3
    norm = sum(re * re + im * im for re, im in payload["best_state"]["coefficients"])
    assert norm == pytest.approx(1.0, abs=1e-9)
    code, out2, _ = run_cli(OPT_ARGS, capsys)
    assert out2 == out1  # bit-identical rerun


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def test_simulate_frequencies_and_determinism(tmp_path, capsys):
    args = ["simulate", "--state", "fock", "--n", "1", "--phase",
            str(np.pi / 2), "--shots", "10000", "--seed", "42", "--grid", "256",
            "--out", str(tmp_path / "sim.csv")]
    code, _, _ = run_cli(args, capsys)
    assert code == 0
    summary = json.loads((tmp_path / "sim.csv.summary.json").read_text())
    assert 0.485 <= summary["outcome_frequencies"]["1,0"] <= 0.515
    first = (tmp_path / "sim.csv").read_bytes()
    code, _, _ = run_cli(args, capsys)
    assert (tmp_path / "sim.csv").read_bytes() == first
    # posterior csv sidecar exists and is normalized
    header, rows = parse_csv((tmp_path / "sim.csv.posterior.csv").read_text())
    total = sum(float(r[1]) for r in rows) * (2 * np.pi / 256)
    assert total == pytest.approx(1.0, abs=1e-9)


def test_simulate_single_shot(capsys):
    code, out, _ = run_cli(["simulate", "--state", "fock", "--n", "1",
                            "--phase", "0.5", "--shots", "1", "--grid", "64"],
                           capsys)
    assert code == 0
    _, rows = parse_csv(out)
    assert len(rows) == 1


def test_simulate_coincidences_never_drawn(capsys):
    code, out, _ = run_cli(["simulate", "--state", "noon", "--n", "2",
                            "--phase", "1.0", "--shots", "400", "--seed", "3",
                            "--grid", "64"], capsys)
    assert code == 0
    _, rows = parse_csv(out)
    assert all((row[1], row[2]) != ("1", "1") for row in rows)


def test_simulate_rejects_non_finite_phase(capsys):
    code, _, _ = run_cli(["simulate", "--state", "fock", "--n", "1",
                          "--phase", "nan", "--shots", "5"], capsys)
    assert code == 2


# ---------------------------------------------------------------------------
# coefficient files
# ---------------------------------------------------------------------------

def test_coefficient_file_roundtrip(tmp_path, capsys):
    path = tmp_path / "state.txt"
    path.write_text("1 0\n1 0\n")  # normalized on load: the N=1 even split
    code, out, _ = run_cli(["fidelity", "--state", str(path), "--grid", "2048"],
                           capsys)
    assert code == 0
    _, rows = parse_csv(out)
    assert rows[0][0] == "custom"
    assert int(rows[0][1]) == 1
    assert float(rows[0][2]) == pytest.approx(H_SINGLE_PHOTON, abs=1e-6)


def test_coefficient_file_errors(tmp_path, capsys):
    missing = tmp_path / "missing.txt"
    code, _, err = run_cli(["probs", "--state", str(missing)], capsys)
    assert code == 2 and "error" in err

    malformed = tmp_path / "bad.txt"
    malformed.write_text("0.3 not-a-number\n")
    assert run_cli(["probs", "--state", str(malformed)], capsys)[0] == 2

    zero = tmp_path / "zero.txt"
    zero.write_text("0 0\n0 0\n")
    assert run_cli(["probs", "--state", str(zero)], capsys)[0] == 2

    mismatched = tmp_path / "short.txt"
    mismatched.write_text("1 0\n")
    assert run_cli(["probs", "--state", str(mismatched), "--n", "3"], capsys)[0] == 2


# ---------------------------------------------------------------------------
# manifests
# ---------------------------------------------------------------------------

def test_manifest_reproduces_run(tmp_path, capsys):
    out_path = tmp_path / "probs.csv"
    argv = ["probs", "--state", "noon", "--n", "3", "--grid", "32",
            "--out", str(out_path)]
    assert run_cli(argv, capsys)[0] == 0
    manifest = json.loads((tmp_path / "probs.csv.manifest.json").read_text())
    assert manifest["command"] == "probs"
    assert manifest["tool_version"]
    first = out_path.read_bytes()

    # rebuild the invocation from the manifest alone
    params = manifest["parameters"]
    replay = ["probs", "--state", params["state"], "--n", str(params["n"]),
              "--grid", str(params["grid_size"]), "--kl1", str(params["kl1"]),
              "--kl2", str(params["kl2"]), "--out", str(out_path)]
    assert run_cli(replay, capsys)[0] == 0
    assert out_path.read_bytes() == first


def test_manifest_on_stderr_without_out(capsys):
    code, out, err = run_cli(["probs", "--state", "fock", "--n", "1",
                              "--grid", "4"], capsys)
    assert code == 0
    assert json.loads(err)["command"] == "probs"
    assert out.startswith("phi,")


def test_csv_is_locale_independent(capsys):
    _, out, _ = run_cli(["probs", "--state", "fock", "--n", "1", "--grid", "4"],
                        capsys)
    assert ";" not in out
    assert "\r" not in out
    assert out.count("\n") == 5  # header + 4 rows, trailing newline
