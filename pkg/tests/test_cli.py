import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from darisa.cli import main

TINY_YAML = """\
arrays:
  tx: {count: 2, size_x: 1.0, size_y: 1.0, spacing: 0.25}
  rx: {count: 1, size_x: 1.0, size_y: 1.0, spacing: 0.25}
clusters:
  - {azimuth_center_deg: 180.0, azimuth_spread_deg: 180.0,
     zenith_center_deg: 90.0, zenith_spread_deg: 90.0}
slots: 2
snr_grid_db: [0.0, 10.0, 20.0]
trials: 2
seed: 11
optimizer: {epsilon: 0.02, tol: 1.0e-4, max_iters: 150, num_draws: 30}
"""


@pytest.fixture
def tiny_config(tmp_path):
    path = tmp_path / "scenario.yaml"
    path.write_text(TINY_YAML)
    return path


def read(path: Path) -> bytes:
    return path.read_bytes()


def test_predict_runs_and_reruns_identically(tiny_config, tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["predict", "--config", str(tiny_config), "--out-dir", str(out1)]) == 0
    assert main(["predict", "--config", str(tiny_config), "--out-dir", str(out2)]) == 0
    assert read(out1 / "predict.csv") == read(out2 / "predict.csv")
    assert read(out1 / "predict.json") == read(out2 / "predict.json")


def test_dof_sweep_outputs(tiny_config, tmp_path):
    out = tmp_path / "dof"
    code = main(["dof-sweep", "--config", str(tiny_config), "--out-dir", str(out),
                 "--no-figures"])
    assert code == 0
    text = (out / "dof_sweep.csv").read_text()
    header = text.splitlines()[0].split(",")
    assert header[0] == "axis"
    assert "dof_theory" in header and "rank_mean" in header


def test_edof_sweep_determinism_and_threads(tiny_config, tmp_path):
    args = ["edof-agility", "--config", str(tiny_config), "--no-figures"]
    out1, out2, out3 = tmp_path / "r1", tmp_path / "r2", tmp_path / "r3"
    assert main(args + ["--out-dir", str(out1)]) == 0
    assert main(args + ["--out-dir", str(out2)]) == 0
    assert main(args + ["--out-dir", str(out3), "--threads", "2"]) == 0
    ref = read(out1 / "edof_agility.csv")
    assert read(out2 / "edof_agility.csv") == ref
    assert read(out3 / "edof_agility.csv") == ref


def test_seed_flag_changes_output(tiny_config, tmp_path):
    out1, out2 = tmp_path / "s1", tmp_path / "s2"
    base = ["dof-sweep", "--config", str(tiny_config), "--no-figures"]
    assert main(base + ["--out-dir", str(out1)]) == 0
    assert main(base + ["--out-dir", str(out2), "--seed", "999"]) == 0
    assert read(out1 / "dof_sweep.csv") != read(out2 / "dof_sweep.csv")


def test_env_seed_override(tiny_config, tmp_path, monkeypatch):
    out1, out2 = tmp_path / "e1", tmp_path / "e2"
    base = ["dof-sweep", "--config", str(tiny_config), "--no-figures"]
    monkeypatch.setenv("DARISA_SEED", "999")
    assert main(base + ["--out-dir", str(out1)]) == 0
    monkeypatch.delenv("DARISA_SEED")
    assert main(base + ["--out-dir", str(out2), "--seed", "999"]) == 0
    assert read(out1 / "dof_sweep.csv") == read(out2 / "dof_sweep.csv")


def test_trials_override(tiny_config, tmp_path):
    out = tmp_path / "t"
    assert main(["dof-sweep", "--config", str(tiny_config), "--out-dir", str(out),
                 "--trials", "1", "--no-figures"]) == 0
    rows = (out / "dof_sweep.csv").read_text().splitlines()[1:]
    assert all(row.split(",")[1] == "1" for row in rows)


def test_optimize_record_and_figure(tiny_config, tmp_path):
    out = tmp_path / "opt"
    assert main(["optimize", "--config", str(tiny_config), "--out-dir", str(out)]) == 0
    record = json.loads((out / "optimize.json").read_text())
    assert "optimizer" in record
    assert 1.0 <= record["optimizer"]["zeta_opt"] <= record["optimizer"]["zeta_high"] + 1e-12
    assert record["optimizer"]["trace"]
    assert (out / "optimize.png").exists()
    assert (out / "optimize.csv").exists()


def test_eigen_capacity_outputs(tiny_config, tmp_path):
    out = tmp_path / "eig"
    assert main(["eigen-capacity", "--config", str(tiny_config), "--out-dir", str(out),
                 "--no-figures"]) == 0
    eig = (out / "eigen_values.csv").read_text().splitlines()
    cap = (out / "capacity.csv").read_text().splitlines()
    assert eig[0].startswith("index,")
    assert cap[0].startswith("snr_db,")
    assert len(cap) == 4  # header + 3 SNR points


def test_edof_bits_axis(tiny_config, tmp_path):
    out = tmp_path / "bits"
    assert main(["edof-bits", "--config", str(tiny_config), "--out-dir", str(out),
                 "--no-figures"]) == 0
    rows = (out / "edof_bits.csv").read_text().splitlines()
    axes = [r.split(",")[0] for r in rows[1:]]
    assert axes == ["1", "2", "3", "inf"]


def test_fatal_error_emits_json_record():
    cmd = [sys.executable, "-m", "darisa.cli", "predict", "--config", "/nonexistent.yaml"]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode != 0
    record = json.loads(proc.stderr.strip().splitlines()[-1])
    assert "error" in record and "message" in record


def test_default_scenario_without_config(tmp_path):
    assert main(["predict", "--out-dir", str(tmp_path / "d")]) == 0
    assert (tmp_path / "d" / "predict.csv").exists()
