import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from qspec import __version__
from qspec.cli import main


def run(tmp_path, *argv, name="out.json"):
    out = tmp_path / name
    code = main([*argv, "--output", str(out)])
    return code, (out.read_text() if out.exists() else "")


def test_spectrum_json(tmp_path):
    code, text = run(tmp_path, "spectrum", "--q", "0.5", "--alpha", "1", "--beta", "0.25", "--levels", "8")
    assert code == 0
    doc = json.loads(text)
    meta = doc["meta"]
    assert (meta["q"], meta["alpha"], meta["beta"], meta["tool_version"]) == (0.5, 1.0, 0.25, __version__)
    assert set(meta) == {"q", "alpha", "beta", "tol", "half_width", "seed", "tool_version"}
    rows = doc["data"]
    top = [r for r in rows if r["sign"] == "+" and r["level"] == 0][0]
    assert abs(top["computed"] - 1.0) < 1e-9
    assert len(rows) == 16
    assert max(r["deviation"] for r in rows) < 1e-9


def test_spectrum_beta0_has_no_negative_levels(tmp_path):
    code, text = run(tmp_path, "spectrum", "--beta", "0")
    assert code == 0
    assert all(r["sign"] == "+" for r in json.loads(text)["data"])


def test_spectrum_csv(tmp_path):
    code, text = run(tmp_path, "spectrum", "--format", "csv", name="out.csv")
    assert code == 0
    rows = list(csv.DictReader(text.splitlines()))
    assert list(rows[0]) == ["level", "sign", "predicted", "computed", "deviation"]
    assert float(rows[0]["predicted"]) == 1.0


def test_measure_masses_and_gram(tmp_path):
    code, text = run(tmp_path, "measure", "--q", "0.5", "--alpha", "1", "--beta", "0.5", "--degree", "6")
    assert code == 0
    doc = json.loads(text)
    masses = np.array([r["mass"] for r in doc["data"]])
    assert np.all(masses >= 0) and abs(masses.sum() - 1) < 1e-12
    G = np.array(doc["gram"])
    assert G.shape == (7, 7)
    d = np.sqrt(np.diag(G))
    assert np.max(np.abs(G / np.outer(d, d) - np.eye(7))) < 1e-10
    assert doc["gram_max_offdiag_scaled"] < 1e-10


def test_measure_nextremal(tmp_path):
    code, text = run(tmp_path, "measure", "--beta", "0", "--alpha", "1", "--q", "0.5")
    assert code == 0
    doc = json.loads(text)
    rows = doc["data"]
    # masses proportional to alpha^{4l}(1+alpha^2 q^{2l}) q^{l(2l-1)}
    for r in rows:
        l = r["l"]
        if abs(l) <= 4:
            assert abs(r["weight"] - (1 + 0.25**l) * 0.5 ** (l * (2 * l - 1))) < 1e-14 * r["weight"]
    assert abs(doc["mass_sum"] - 1) < 1e-12


@pytest.mark.parametrize("suite", ["wronskian", "split-beta-1q", "psi4"])
def test_verify_examples_pass(tmp_path, suite):
    code, text = run(tmp_path, "verify", suite)
    assert code == 0
    rows = json.loads(text)["data"]
    assert rows and all(r["passed"] for r in rows)
    if suite == "psi4":
        assert all(r["rel_residual"] < 1e-10 for r in rows)
    if suite == "split-beta-1q":
        ids = {r["identity_id"] for r in rows}
        assert {"split_even_block", "split_odd_block"} <= ids


@pytest.mark.parametrize("suite", ["orthogonality", "mixed", "basis", "dual", "contiguous", "bailey",
                                   "genfun", "symmetries", "diffeq"])
def test_every_suite_passes_at_defaults(tmp_path, suite):
    code, _ = run(tmp_path, "verify", suite)
    assert code == 0


def test_injected_threshold_fails(tmp_path):
    code, text = run(tmp_path, "verify", "wronskian", "--threshold", "1e-30")
    assert code == 1
    assert not all(r["passed"] for r in json.loads(text)["data"])


@pytest.mark.parametrize("argv", [["spectrum", "--q", "2"], ["spectrum", "--tol", "-1"],
                                  ["verify", "no-such-suite"], ["spectrum", "--half-width", "0"],
                                  ["spectrum", "--beta", "-1"]])
def test_usage_errors_exit_2(tmp_path, argv, capsys):
    assert main([*argv, "--output", str(tmp_path / "x")]) == 2


def test_bad_config_file_exits_2(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("q = 0.5\nnot_a_key = 3\n")
    assert main(["spectrum", "--config", str(cfg), "--output", str(tmp_path / "o")]) == 2
    cfg.write_text("q 0.5\n")
    assert main(["spectrum", "--config", str(cfg), "--output", str(tmp_path / "o")]) == 2
    assert main(["spectrum", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_config_file_and_flag_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# example\nq = 0.6\nbeta = 0.7\nhalf-width = 30\ntol = 1e-12\n")
    monkeypatch.setenv("QSPEC_TOL", "1e-10")
    code, text = run(tmp_path, "spectrum", "--config", str(cfg), "--beta", "0.3")
    meta = json.loads(text)["meta"]
    assert code == 0
    assert (meta["q"], meta["beta"], meta["half_width"], meta["tol"]) == (0.6, 0.3, 30, 1e-12)


def test_env_tolerance(tmp_path, monkeypatch):
    monkeypatch.setenv("QSPEC_TOL", "1e-11")
    _, text = run(tmp_path, "spectrum")
    assert json.loads(text)["meta"]["tol"] == 1e-11
    _, text = run(tmp_path, "spectrum", "--tol", "1e-12")
    assert json.loads(text)["meta"]["tol"] == 1e-12


@pytest.mark.parametrize("argv", [["spectrum"], ["measure", "--degree", "3"], ["verify", "contiguous"],
                                  ["verify", "bailey", "--format", "csv"]])
def test_reruns_are_byte_identical(tmp_path, argv):
    a = run(tmp_path, *argv, "--seed", "3", name="a")[1]
    b = run(tmp_path, *argv, "--seed", "3", name="b")[1]
    assert a and a == b


def test_parallel_jobs_match_serial(tmp_path):
    a = run(tmp_path, "verify", "genfun", name="a")[1]
    b = run(tmp_path, "verify", "genfun", "--jobs", "2", name="b")[1]
    assert a == b


def test_seed_changes_sampled_points(tmp_path):
    a = run(tmp_path, "verify", "contiguous", "--seed", "1", name="a")[1]
    b = run(tmp_path, "verify", "contiguous", "--seed", "2", name="b")[1]
    assert a != b


def test_stdout_and_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "qspec", "spectrum", "--levels", "2"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["data"][0]["predicted"] == 1.0
    ver = subprocess.run([sys.executable, "-m", "qspec", "--version"], capture_output=True, text=True)
    assert ver.returncode == 0 and ver.stdout.strip() == __version__
