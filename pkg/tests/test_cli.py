"""CLI subcommands, exit codes, and output determinism."""

import json
import subprocess
import sys
from pathlib import Path

import pytest

from qrisac.cli import main
from qrisac.scenario import ScenarioConfig


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    payload = json.loads(out.out) if out.out.strip() else {}
    return code, payload


@pytest.fixture()
def fast_config_file(tmp_path):
    cfg = ScenarioConfig(m_elements=32, m_code=32, s_max=8, codebook_size=16, k_clutter=50,
                         delay_bins=32, trials=1000, master_seed=5)
    path = tmp_path / "config.json"
    path.write_text(cfg.to_json())
    return path


def test_validate_ok(fast_config_file, capsys):
    code, payload = run_cli(["--config", str(fast_config_file), "validate"], capsys)
    assert code == 0
    assert payload["status"] == "ok"


def test_validate_rejects_bad_config(tmp_path, capsys):
    cfg = ScenarioConfig()
    text = cfg.to_json().replace('"t_min": 1e-06', '"t_min": 0.001')
    bad = tmp_path / "bad.json"
    bad.write_text(text)
    code, payload = run_cli(["--config", str(bad), "validate"], capsys)
    assert code == 2
    assert payload["status"] == "invalid"
    assert any("(D2)" in v for v in payload["violations"])


def test_validate_rejects_unknown_key(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"no_such_knob": 1}')
    code, payload = run_cli(["--config", str(bad), "validate"], capsys)
    assert code == 2
    assert any("unknown config key" in v for v in payload["violations"])


def test_timing_feasible_and_infeasible(tmp_path, capsys):
    code, payload = run_cli(["timing"], capsys)
    assert code == 0 and payload["status"] == "ok"
    assert payload["timing"]["slot_update_feasible"]

    cfg = ScenarioConfig(t_sw=50e-6, eta=0.6)
    p = tmp_path / "slow.json"
    p.write_text(cfg.to_json())
    code, payload = run_cli(["--config", str(p), "timing"], capsys)
    assert code == 2
    assert payload["status"] == "infeasible"
    assert "reduce m_code" in payload["timing"]["recommendation"]


def test_unknown_scheme_filter(capsys):
    code, payload = run_cli(["--schemes", "B9", "roc"], capsys)
    assert code == 2
    assert payload["status"] == "invalid"


def test_smoke_run_all_and_reproducibility(fast_config_file, tmp_path, capsys):
    out1 = tmp_path / "run1"
    out2 = tmp_path / "run2"
    for out in (out1, out2):
        code, payload = run_cli(
            ["--config", str(fast_config_file), "--trials", "1000",
             "--schemes", "B0,QRTM", "--out", str(out), "all"],
            capsys,
        )
        assert code == 0 and payload["status"] == "ok"
        for name in ("roc.csv", "secrecy.csv", "siu.csv", "runtime.csv", "manifest.json"):
            assert (out / name).exists()
    # identical invocation -> identical Monte Carlo outputs and manifest
    for name in ("roc.csv", "secrecy.csv", "siu.csv", "manifest.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_single_experiment_writes_manifest(fast_config_file, tmp_path, capsys):
    out = tmp_path / "one"
    code, payload = run_cli(
        ["--config", str(fast_config_file), "--trials", "1000", "--schemes", "B0",
         "--out", str(out), "secrecy"],
        capsys,
    )
    assert code == 0
    assert (out / "secrecy.csv").exists() and (out / "manifest.json").exists()


def test_env_out_dir(fast_config_file, tmp_path, capsys, monkeypatch):
    env_dir = tmp_path / "env_out"
    monkeypatch.setenv("QRISAC_OUT_DIR", str(env_dir))
    code, payload = run_cli(
        ["--config", str(fast_config_file), "--trials", "1000", "--schemes", "B0", "runtime"],
        capsys,
    )
    assert code == 0
    assert (env_dir / "runtime.csv").exists()


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qrisac.cli", "validate"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["status"] == "ok"
