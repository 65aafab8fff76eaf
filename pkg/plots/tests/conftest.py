"""Fixtures: real experiment CSVs produced through the mfoc command line.

The plotting package consumes only the CSV contract, so the fixtures generate
inputs the same way a user would: by invoking the mfoc CLI. A smoke-scale
config keeps the whole setup under a few seconds.
"""

import json

import pytest

from mfoc.cli import main as mfoc_main

A9_LINES = []


@pytest.fixture
def criterion():
    def record(name, ok, detail):
        line = f"{name} {'PASS' if ok else 'FAIL'} - {detail}"
        A9_LINES.append(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if not A9_LINES:
        return
    terminalreporter.ensure_newline()
    terminalreporter.section("plots acceptance")
    for line in A9_LINES:
        terminalreporter.write_line("")
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def harness_csvs(tmp_path_factory):
    """Dict of real CSV paths: trajectory, costs (two modes), sweep."""
    root = tmp_path_factory.mktemp("harness")
    cfg = root / "smoke.json"
    cfg.write_text(json.dumps({"dt_sample": 5e-4, "N_epi": 40}))

    run = root / "run"
    rl = root / "rl"
    assert mfoc_main(["step1", "--config", str(cfg), "--out", str(run)]) == 0
    assert mfoc_main(["step2", "--config", str(cfg), "--out", str(run),
                      "--mode", "K+RL"]) == 0
    assert mfoc_main(["step2", "--config", str(cfg), "--out", str(rl),
                      "--mode", "RL-alone"]) == 0
    assert mfoc_main(["sweep", "--config", str(cfg), "--out", str(run),
                      "--n-sim", "2"]) == 0

    return {
        "trajectory": str(run / "trajectory.csv"),
        "costs_krl": str(run / "costs.csv"),
        "costs_rl": str(rl / "costs.csv"),
        "sweep": str(run / "sweep.csv"),
    }
