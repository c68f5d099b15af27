import json
import shutil
import subprocess
import sys

import pytest

from pmechanics import cli


def run(tmp_path, *args):
    return cli.main(["--out-dir", str(tmp_path), *args])


def test_brackets_prints_poisson_bracket(tmp_path, capsys):
    assert run(tmp_path, "brackets", "--f", "q^3", "--g", "p^3") == 0
    assert capsys.readouterr().out.splitlines()[0] == "9*q^2*p^2"


def test_brackets_formal(tmp_path, capsys):
    assert run(tmp_path, "brackets", "--f", "q^3", "--g", "p^3", "--hbar", "formal") == 0
    assert capsys.readouterr().out.splitlines()[0] == "9*q^2*p^2 - 6*lam^2"


def test_report_has_schema_and_config(tmp_path):
    assert run(tmp_path, "brackets", "--f", "q", "--g", "p") == 0
    doc = json.loads((tmp_path / "brackets-report.json").read_text())
    assert doc["schema_version"]
    assert doc["status"] == "ok"
    assert doc["config"]["brackets"]["f"] == "q"
    assert doc["results"]["result"] == "1"


def test_kleingordon_dispersion_within_one_percent(tmp_path, capsys):
    assert run(tmp_path, "kleingordon", "--k", "2", "--lattice", "800x128") == 0
    doc = json.loads((tmp_path / "kleingordon-report.json").read_text())
    assert doc["results"]["dispersion"]["rel_error"] < 0.01
    assert doc["results"]["energy_drift_shadow"] < 1e-10
    assert (tmp_path / "kleingordon-dispersion.csv").exists()
    assert (tmp_path / "kleingordon-energy.csv").exists()


def test_kleingordon_cfl_violation_is_numerical_failure(tmp_path, capsys):
    assert run(tmp_path, "kleingordon", "--dt", "1.0", "--lattice", "10x32") == 3
    assert "numerical failure" in capsys.readouterr().err


def test_oscillator_writes_artifacts(tmp_path, capsys):
    assert run(tmp_path, "oscillator", "--dt", "0.01", "--hbar", "0,0.5") == 0
    doc = json.loads((tmp_path / "oscillator-report.json").read_text())
    q, p = doc["results"]["final_state"]
    assert q == pytest.approx(1.0, abs=1e-8) and p == pytest.approx(0.0, abs=1e-8)
    assert (tmp_path / "oscillator-trajectory.csv").exists()
    assert (tmp_path / "oscillator-observable-hbar0.5.csv").exists()


def test_oscillator_quartic_without_truncation_is_config_error(tmp_path, capsys):
    assert run(tmp_path, "oscillator", "--hamiltonian", "p^2/2 + q^4") == 2


def test_fock_residuals(tmp_path, capsys):
    assert run(tmp_path, "fock", "--grid=-6,6,128") == 0
    doc = json.loads((tmp_path / "fock-report.json").read_text())
    assert doc["results"]["residuals"]["spectral"]["relative"] < 1e-10


@pytest.mark.parametrize(
    "args",
    [
        ["brackets", "--f", "q^^3"],
        ["brackets", "--hbar", "abc"],
        ["brackets", "--kind", "moyal"],
        ["kleingordon", "--lattice", "12by5"],
        ["fock", "--shift", "1,2,3", "--state", "coherent"],
    ],
)
def test_bad_values_exit_2(tmp_path, capsys, args):
    assert run(tmp_path, *args) == 2


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[brackets]\nf = q^2\ng = p^2\n")
    assert cli.main(["--config", str(cfg), "--out-dir", str(tmp_path), "brackets"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "4*q*p"
    assert cli.main(["--config", str(cfg), "--out-dir", str(tmp_path), "brackets", "--g", "p"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "2*q"


@pytest.mark.parametrize("text", ["[nosuch]\nx = 1\n", "[brackets]\nwhat = 1\n", "not an ini file"])
def test_bad_config_files_exit_2(tmp_path, capsys, text):
    cfg = tmp_path / "bad.ini"
    cfg.write_text(text)
    assert cli.main(["--config", str(cfg), "--out-dir", str(tmp_path), "brackets"]) == 2


def test_unknown_flag_is_usage_error(tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        run(tmp_path, "brackets", "--nope", "1")
    assert info.value.code == 2


def test_missing_config_file(tmp_path, capsys):
    assert cli.main(["--config", str(tmp_path / "absent.ini"), "brackets"]) == 2


def test_verify_suite_passes(tmp_path, capsys):
    assert run(tmp_path, "verify", "--suite", "groups") == 0
    out = capsys.readouterr().out
    assert "PASS" in out
    doc = json.loads((tmp_path / "verify-report.json").read_text())
    assert not doc["results"]["failed"]


def test_verify_failure_exit_1(tmp_path, monkeypatch, capsys):
    from pmechanics import checks

    failing = checks.CheckResult("always fails", False, {"x": 1.0}, {"x": 0.0}, 0.0)
    monkeypatch.setitem(checks.SUITES, "groups", [lambda: failing])
    assert run(tmp_path, "verify", "--suite", "groups") == 1
    doc = json.loads((tmp_path / "verify-report.json").read_text())
    assert doc["status"] == "check_failed"
    assert doc["results"]["failed"] == ["always fails"]


def test_reports_are_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert cli.main(["--out-dir", str(d), "verify", "--suite", "groups"]) == 0
    da = json.loads((a / "verify-report.json").read_text())
    db = json.loads((b / "verify-report.json").read_text())
    da["config"]["output"].pop("out_dir")
    db["config"]["output"].pop("out_dir")
    assert da == db


@pytest.mark.skipif(shutil.which("pmech") is None, reason="console script not installed")
def test_console_script(tmp_path):
    out = subprocess.run(
        ["pmech", "--out-dir", str(tmp_path), "brackets", "--f", "q^3", "--g", "p^3"],
        capture_output=True,
        text=True,
    )
    assert out.returncode == 0
    assert out.stdout.splitlines()[0] == "9*q^2*p^2"


def test_module_entry_point(tmp_path):
    out = subprocess.run(
        [sys.executable, "-m", "pmechanics.cli", "--out-dir", str(tmp_path), "brackets", "--f", "q", "--g", "q"],
        capture_output=True,
        text=True,
    )
    assert out.returncode == 0
    assert out.stdout.splitlines()[0] == "0"
