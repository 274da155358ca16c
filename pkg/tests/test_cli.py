import json
import subprocess
import sys

import numpy as np
import pytest

from ldpcqubo.channel import ChannelConfig, transmit
from ldpcqubo.cli import main
from ldpcqubo.codes import derive_generator, encode, load_code, resolve_code, syndrome


def run(*argv):
    return subprocess.run([sys.executable, "-m", "ldpcqubo", *argv], capture_output=True, text=True)


def test_encode(capsys):
    assert main(["encode", "--message", "1010000000000001"]) == 0
    msg, word = capsys.readouterr().out.split()
    g = derive_generator(load_code(resolve_code("ldpc_32_16")))
    expect = encode(np.array([int(c) for c in msg], dtype=np.uint8), g)
    assert word == "".join(map(str, expect))


def test_encode_wrong_length(capsys):
    assert main(["encode", "--message", "101"]) == 1
    assert "16 bits" in capsys.readouterr().err


@pytest.mark.parametrize("decoder", ["sa", "bp", "exhaustive"])
def test_decode_one(tmp_path, capsys, decoder):
    h = load_code(resolve_code("ldpc_32_16"))
    g = derive_generator(h)
    c = encode(np.random.default_rng(0).integers(0, 2, 16), g)
    rx = transmit(c, ChannelConfig(6.0), np.random.default_rng(1))
    path = tmp_path / "r.csv"
    path.write_text(rx.to_csv())
    assert main(["decode-one", str(path), "--snr", "6", "--decoder", decoder, "--sweeps", "30", "--reads", "100"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["bits"] == "".join(map(str, c))
    assert out["valid"] is True
    assert not syndrome(np.array([int(b) for b in out["bits"]]), h).any()


def test_decode_one_length_mismatch(tmp_path, capsys):
    path = tmp_path / "r.txt"
    path.write_text("0.5 -0.5 1.0\n")
    assert main(["decode-one", str(path), "--snr", "3"]) == 1
    assert "code length" in capsys.readouterr().err


def test_sweep_config_and_overrides(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"decoders": ["sa", "bp"], "snr_db": [2.0], "trials": 5, "num_sweeps": 10,
                               "num_reads": 20, "w1": 1.0}))
    out = tmp_path / "res.csv"
    proc = run("sweep", "--config", str(cfg), "--trials", "8", "--snr", "1,3", "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    text = out.read_text()
    echo = json.loads(text.splitlines()[0][len("# config: "):])
    assert echo["trials"] == 8 and echo["snr_db"] == [1.0, 3.0] and echo["w1"] == 1.0
    assert echo["num_sweeps"] == 10
    assert len([ln for ln in text.splitlines() if not ln.startswith("#")]) == 1 + 2 * 2


def test_sweep_bad_config_exit_code(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"snr": [1.0]}))
    proc = run("sweep", "--config", str(cfg), "--out", str(tmp_path / "x.csv"))
    assert proc.returncode != 0
    assert "unknown config keys" in proc.stderr


def test_tv_snr_writes_frames(tmp_path):
    out = tmp_path / "tv.csv"
    proc = run("tv-snr", "--decoders", "bp", "--trials", "12", "--mu", "4", "--sigma", "1", "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    frames = (tmp_path / "tv_frames.csv").read_text().splitlines()
    assert frames[0] == "frame,snr_db,bp_correct" and len(frames) == 13
    assert "fraction correct" in proc.stdout


def test_missing_subcommand():
    assert run().returncode != 0


@pytest.mark.parametrize("name", ["fixed_snr", "time_varying", "stub_adapter"])
def test_shipped_configs_load(name):
    from pathlib import Path

    from ldpcqubo.harness import ExperimentConfig

    ExperimentConfig.load(Path(__file__).resolve().parent.parent / "configs" / f"{name}.json")


def test_sweep_with_stub_adapter_config(tmp_path):
    from pathlib import Path

    cfg = Path(__file__).resolve().parent.parent / "configs" / "stub_adapter.json"
    out = tmp_path / "adapter.csv"
    proc = run("sweep", "--config", str(cfg), "--trials", "2", "--snr", "6", "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    decoders = [ln.split(",")[1] for ln in out.read_text().splitlines() if ln.startswith("6.0,")]
    assert decoders == ["adapter", "sa", "bp", "exhaustive"]
