"""Acceptance gate: one test (and one printed PASS/FAIL line) per
numbered criterion, each at its stated tolerance.

The numeric criteria delegate to the built-in verification suites, which
carry the analytic oracles; the I/O criterion is checked directly here.
Run with `pytest -s tests/test_acceptance.py` to see the summary lines.
"""

import struct
import sys

import numpy as np
import pytest

from nematicflow import verify
from nematicflow.config import load_config
from nematicflow.errors import ConfigError, SnapshotFormatError
from nematicflow.runner import (CSV_HEADER, read_snapshot, read_timeseries,
                                run, write_snapshot)
from nematicflow.scenarios import random_smooth
from nematicflow.spectral import Grid


def _report(criterion: str, results) -> None:
    """Print one PASS/FAIL line for a criterion, then assert it."""
    failed = [(name, detail) for name, ok, detail in results if not ok]
    status = "FAIL" if failed else "PASS"
    print(f"[{status}] {criterion}", file=sys.stderr)
    assert not failed, failed


@pytest.fixture(scope="module")
def energy_reports():
    """Criterion-4 runs, shared with criterion 5."""
    return verify.check_energy_identity()


@pytest.fixture(scope="module")
def monitor_results():
    """Criterion-6 runs; the stationary report is shared with criterion 8."""
    return verify.check_monitor()


def test_criterion_01_spectral_exactness():
    _report("criterion 1: spectral operator exactness", verify.check_spectral())


def test_criterion_02_navier_stokes_reduction():
    _report("criterion 2: Navier-Stokes reduction (Taylor-Green)",
            verify.check_navier_stokes_reduction())


def test_criterion_03_harmonic_map_reduction():
    _report("criterion 3: harmonic-map heat flow reduction",
            verify.check_harmonic_map_reduction())


def test_criterion_04_energy_identity(energy_reports):
    results, _ = energy_reports
    _report("criterion 4: discrete energy identity", results)


def test_criterion_05_constraint_maintenance(energy_reports):
    _, reports = energy_reports
    _report("criterion 5: unit-sphere constraint maintenance",
            verify.check_constraint(reports))


def test_criterion_06_monitor_correctness(monitor_results):
    results, _ = monitor_results
    _report("criterion 6: blow-up monitor values", results)


def test_criterion_07_controlled_norms():
    _report("criterion 7: controlled vorticity/Hessian norms",
            verify.check_lemma_norms())


def test_criterion_08_gronwall_envelope(monitor_results):
    _, winding_report = monitor_results
    _report("criterion 8: exponential envelope fit",
            verify.check_envelope(winding_report))


def test_criterion_09_temporal_convergence():
    _report("criterion 9: temporal convergence orders",
            verify.check_temporal_convergence())


def _io_contract_results(tmp_path):
    results = []

    minimal = "dim = 2\nres = 64\nscenario = taylor_green\nt_max = 1\n"
    config = load_config(minimal)
    results.append(("config accepts minimal input",
                    config.res == 64 and config.cfl_factor == 0.5, ""))
    bad_overrides = (["dim=4"], ["res=48"], ["scenario=bogus"], ["nu=-1"],
                     ["unknown_key=1"], ["integrator=AB2"], ["t_max=-1"])
    rejected = 0
    for overrides in bad_overrides:
        try:
            load_config(minimal, overrides=overrides)
        except ConfigError:
            rejected += 1
    for bad_text in ("no equals sign\n", minimal + "dim = 3\n"):
        try:
            load_config(bad_text)
        except ConfigError:
            rejected += 1
    results.append(("config rejects malformed input",
                    rejected == 9, f"{rejected}/9 rejected"))

    report = run(load_config(minimal, overrides=[
        "t_max=0.02", "dt=0.01", "record_every=1",
        f"output_dir={tmp_path}"]))
    csv_path = tmp_path / "timeseries.csv"
    header = csv_path.read_text().splitlines()[0]
    results.append(("CSV header is exact", header == CSV_HEADER, header))
    loaded = read_timeseries(csv_path)
    exact = all(a.as_tuple() == b.as_tuple()
                for a, b in zip(loaded, report.history))
    results.append(("CSV round-trip is exact",
                    exact and len(loaded) == len(report.history), ""))

    s = random_smooth(Grid(2, 32), seed=11)
    snap_path = tmp_path / "state.bin"
    write_snapshot(s, snap_path)
    back = read_snapshot(snap_path)
    bit_identical = (np.array_equal(back.u.phys, s.u.phys)
                     and np.array_equal(back.d.phys, s.d.phys)
                     and back.t == s.t and back.grid == s.grid)
    results.append(("snapshot round-trip is bit-identical", bit_identical, ""))

    header_bytes = 4 + struct.calcsize("<BBIdd")
    expected = header_bytes + (2 + 3) * 32**2 * 8
    results.append(("snapshot size formula",
                    snap_path.stat().st_size == expected,
                    f"{snap_path.stat().st_size} vs {expected}"))
    try:
        read_snapshot(csv_path)
        bad_magic_caught = False
    except SnapshotFormatError:
        bad_magic_caught = True
    results.append(("snapshot reader rejects foreign files",
                    bad_magic_caught, ""))
    return results


def test_criterion_10_io_contracts(tmp_path):
    _report("criterion 10: configuration and I/O contracts",
            _io_contract_results(tmp_path))
