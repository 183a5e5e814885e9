import csv
import io
import json

import pytest

from mcis.cli import main
from mcis.harness import RESULT_HEADER, results_to_csv, run_trial
from mcis.model import NetworkConfig


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_classify_text(capsys):
    code, out, err = run_cli(capsys, "classify", "--n", "1000000", "--ca", "4", "--hops", "5")
    assert code == 0
    assert out == "Case 1 / Sub-case 1 / InterfaceBottleneck\n"


def test_classify_formats_agree(capsys):
    code, out_json, _ = run_cli(
        capsys, "classify", "--n", "1000000", "--ca", "4", "--hops", "5", "--format", "json"
    )
    assert code == 0
    code, out_csv, _ = run_cli(
        capsys, "classify", "--n", "1000000", "--ca", "4", "--hops", "5", "--format", "csv"
    )
    assert code == 0
    obj = json.loads(out_json)
    rows = list(csv.DictReader(io.StringIO(out_csv)))
    assert len(rows) == 1
    for key, val in obj.items():
        got = rows[0][key]
        assert got == str(val) or float(got) == pytest.approx(val)


def test_bounds_with_config_file(tmp_path, capsys):
    cfg = tmp_path / "net.cfg"
    cfg.write_text(
        "n=1000000\nb=4\nC=6\nC_A=4\nC_I=2\nm=2\nW=5\nW_A=1\nW_I=2\nH=50\n"
    )
    code, out, _ = run_cli(capsys, "bounds", "--config", str(cfg), "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["condition"] == "connectivity"
    assert data["lambda_a"] == pytest.approx(1.047843e-2, rel=1e-5)


def test_bounds_missing_config_file(capsys):
    code, out, err = run_cli(capsys, "bounds", "--config", "missing.cfg")
    assert code == 1
    assert "missing.cfg" in err


def test_flag_overrides_config_file(tmp_path, capsys):
    cfg = tmp_path / "net.cfg"
    cfg.write_text("n=1000000\nb=4\nC=6\nC_A=4\nC_I=2\nm=2\nW=5\nW_A=1\nW_I=2\nH=50\n")
    code, out, _ = run_cli(
        capsys, "bounds", "--config", str(cfg), "--hops", "5", "--format", "json"
    )
    assert code == 0
    assert json.loads(out)["condition"] == "interface-bottleneck"


def test_invalid_config_exit_code(capsys):
    code, out, err = run_cli(capsys, "bounds", "--n", "100", "--ci", "3")
    assert code == 1
    assert "channel split" in err


def test_unknown_flag_rejected(capsys):
    code, out, err = run_cli(capsys, "classify", "--n", "10", "--ca", "1", "--hops", "1", "--bogus", "2")
    assert code == 1


def test_topo_csv(capsys):
    code, out, _ = run_cli(
        capsys, "topo", "--n", "40", "--b", "4", "--c", "2", "--ca", "1", "--ci", "1",
        "--m", "2", "--w", "2", "--wa", "1", "--wi", "0.5", "--seed", "5",
        "--format", "csv",
    )
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 44
    assert {r["kind"] for r in rows} == {"node", "bs"}
    assert all(0.0 <= float(r["x"]) <= 1.0 for r in rows)


def test_simulate_csv_matches_library(capsys):
    args = [
        "simulate", "--n", "300", "--b", "4", "--c", "6", "--ca", "4", "--ci", "2",
        "--m", "2", "--w", "10", "--wa", "6", "--wi", "2", "--hops", "2",
        "--seed", "11", "--format", "csv",
    ]
    code, out, _ = run_cli(capsys, *args)
    assert code == 0
    cfg = NetworkConfig(n=300, b=4, C=6, C_A=4, C_I=2, m=2, W=10.0, W_A=6.0,
                        W_I=2.0, H=2, seed=11)
    assert out == results_to_csv([run_trial(cfg)])


def test_simulate_byte_identical_reruns(capsys):
    args = ["simulate", "--n", "200", "--seed", "7", "--format", "csv"]
    code1, out1, _ = run_cli(capsys, *args)
    code2, out2, _ = run_cli(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2


def test_simulate_env_seed(capsys, monkeypatch):
    monkeypatch.setenv("MCIS_SEED", "7")
    code, with_env, _ = run_cli(capsys, "simulate", "--n", "200", "--format", "csv")
    monkeypatch.delenv("MCIS_SEED")
    code2, explicit, _ = run_cli(capsys, "simulate", "--n", "200", "--seed", "7", "--format", "csv")
    assert code == code2 == 0
    assert with_env == explicit


def test_sweep_csv_and_json_agree(capsys, tmp_path):
    base = [
        "sweep", "--n", "128", "--b", "1", "--c", "1", "--ca", "1", "--ci", "0",
        "--m", "0", "--w", "1", "--wa", "1", "--wi", "0", "--hops", "2",
        "--vary", "n=128,256", "--seeds", "0,1",
    ]
    code, out_csv, _ = run_cli(capsys, *base, "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out_csv)))
    assert rows[0] == RESULT_HEADER
    assert len(rows) == 5
    code, out_json, _ = run_cli(capsys, *base, "--format", "json")
    assert code == 0
    json_rows = [json.loads(line) for line in out_json.splitlines()]
    assert len(json_rows) == 4
    # field-for-field equivalence between the two encodings
    assert all(set(j) == set(RESULT_HEADER) for j in json_rows)
    for crow, jrow in zip(rows[1:], json_rows):
        for idx, key in enumerate(RESULT_HEADER):
            val = jrow[key]
            if isinstance(val, float):
                assert float(crow[idx]) == pytest.approx(val, rel=0, abs=0)
            else:
                assert crow[idx] == str(val)


def test_sweep_out_file(capsys, tmp_path):
    path = tmp_path / "rows.csv"
    code, out, _ = run_cli(
        capsys, "sweep", "--n", "128", "--b", "1", "--c", "1", "--ca", "1",
        "--ci", "0", "--m", "0", "--w", "1", "--wa", "1", "--wi", "0",
        "--hops", "2", "--seeds", "0", "--format", "csv", "--out", str(path),
    )
    assert code == 0 and out == ""
    rows = list(csv.reader(path.open()))
    assert rows[0] == RESULT_HEADER and len(rows) == 2


def test_verify_subset(capsys):
    code, out, _ = run_cli(capsys, "verify", "--criteria", "1,10")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 2
    assert lines[0].startswith("[PASS] criterion  1")
    assert lines[1].startswith("[PASS] criterion 10")


def test_remote_server_matches_in_process(capsys, tmp_path):
    import socket
    import subprocess
    import sys
    import time

    import httpx

    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        port = s.getsockname()[1]
    proc = subprocess.Popen(
        [sys.executable, "-m", "uvicorn", "mcis.service:app", "--host", "127.0.0.1",
         "--port", str(port), "--log-level", "error"],
        stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL,
    )
    try:
        base = f"http://127.0.0.1:{port}"
        for _ in range(100):
            try:
                if httpx.get(f"{base}/health", timeout=1).status_code == 200:
                    break
            except httpx.HTTPError:
                time.sleep(0.1)
        else:
            pytest.fail("service did not come up")
        args = ["simulate", "--n", "200", "--seed", "7", "--format", "csv"]
        code_local, local, _ = run_cli(capsys, *args)
        code_remote, remote, _ = run_cli(capsys, "--server", base, *args)
        assert code_local == code_remote == 0
        assert local == remote  # byte-identical through both transports
    finally:
        proc.terminate()
        proc.wait(timeout=10)
