import json

import numpy as np
import pytest

from mepcs import experiments as ex
from mepcs.cli import main
from mepcs.quantization import read_signal
from mepcs.sensing import read_matrix


def test_generate_sense_recover(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["generate", "--n", "8", "--b", "2", "--seed", "3", "--out", str(out)]) == 0
    x = read_signal(out / "signal.txt")
    xq = read_signal(out / "quantized.txt")
    assert x.size == 8 and np.all(xq <= x) and np.all(x - xq < 0.25)

    assert main(["sense", "--signal", str(out / "signal.txt"), "--rate", "0.75", "--seed", "1", "--out", str(out)]) == 0
    assert read_matrix(out / "A.csv").shape == (6, 8)

    capsys.readouterr()
    rc = main([
        "recover", "--matrix", str(out / "A.csv"), "--measurements", str(out / "y.txt"),
        "--signal", str(out / "signal.txt"), "--b", "2", "--k", "0", "--solver", "exhaustive",
        "--lam", "500", "--out", str(out), "--save-weights",
    ])
    assert rc == 0
    record = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert record["m"] == 6 and record["n"] == 8 and record["mode"] == "AMEP"
    assert record["cost"] >= record["residual"] >= 0
    assert (out / "xhat.txt").exists() and (out / "weights.tsv").exists()


def test_recover_lmep_with_trace(tmp_path, capsys):
    out = tmp_path
    main(["generate", "--n", "10", "--b", "2", "--out", str(out)])
    main(["sense", "--signal", str(out / "signal.txt"), "--m", "5", "--out", str(out)])
    capsys.readouterr()
    rc = main([
        "recover", "--matrix", str(out / "A.csv"), "--measurements", str(out / "y.txt"),
        "--b", "2", "--weights", "lmep", "--sweeps", "10", "--restarts", "1", "--trace", "--out", str(out),
    ])
    assert rc == 0
    assert json.loads(capsys.readouterr().out.strip())["mode"] == "LMEP"
    lines = (out / "trace.jsonl").read_text().splitlines()
    assert len(lines) == 10 and "temperature" in json.loads(lines[0])


def test_sweep_with_config_file(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("b = 2\nk = 0\nn = 8\nrates = 0.5, 1.0\ntrials = 3\nsweeps = 30\nrestarts = 1\n")
    out = tmp_path / "out"
    assert main(["sweep", "--config", str(cfg), "--trials", "2", "--plot", "--no-timing", "--out", str(out)]) == 0
    rep = ex.parse_report(out / "recovery.csv")
    assert len(rep.rows) == 4
    assert (out / "recovery.svg").exists()
    assert "rate=0.5" in capsys.readouterr().out


def test_sweep_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(ex.OUTPUT_ENV, str(tmp_path / "env"))
    rc = main(["sweep", "--kind", "robustness", "--weights", "perturbed", "--eps-w", "0,0.1",
               "--b", "2", "--n", "8", "--rates", "0.5", "--trials", "2", "--sweeps", "20", "--restarts", "1"])
    assert rc == 0
    assert len(ex.parse_report(tmp_path / "env" / "robustness.csv").rows) == 4


def test_verify_exit_codes(monkeypatch, capsys):
    assert main(["verify", "--instances", "5"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 4

    monkeypatch.setitem(ex.SUITES, "identity", lambda **kw: ex.SuiteResult("broken", 0, 1, ["x"]))
    assert main(["verify", "--suite", "identity"]) == 1
    assert "FAIL broken" in capsys.readouterr().out


def test_converge_and_estimate_id(tmp_path, capsys):
    assert main(["converge", "--source", "finite-markov", "--b", "1", "--k", "1",
                 "--n-values", "100,1000", "--seeds", "3", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "convergence.csv").read_text().startswith("n,seed,l1")
    assert main(["estimate-id", "--p", "0.2", "--b-values", "4,8"]) == 0
    text = capsys.readouterr().out
    ratio = float(text.split("b=8 ratio=")[1].split()[0])
    assert ratio == pytest.approx(0.2 + 0.722 / 8, abs=0.01)


def test_bad_config_is_an_error(capsys):
    assert main(["estimate-id", "--rates", "2"]) == 2
    assert "error" in capsys.readouterr().err
