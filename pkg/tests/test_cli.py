import csv
import json
import shutil
import subprocess
import sys
from importlib import resources

import pytest

from qnn_capacity.cli import SWEEP_HEADER, main
from qnn_capacity.data import load_csv


@pytest.fixture
def sample(tmp_path):
    src = resources.files("qnn_capacity") / "samples" / "synthetic_b05.csv"
    dst = tmp_path / "b05.csv"
    dst.write_bytes(src.read_bytes())
    return dst


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def quick_train(tmp_path, sample, *extra):
    model, report = tmp_path / "m.json", tmp_path / "r.json"
    code = main(["train", "--data", str(sample), "--qubits", "2", "--depth", "1",
                 "--max-iters", "15", "--seed", "3", "--out", str(model),
                 "--report", str(report), *extra])
    return code, model, report


def test_train_writes_model_and_report(tmp_path, sample, capsys):
    code, model, report = quick_train(tmp_path, sample)
    assert code == 0 and model.exists() and report.exists()
    doc = json.loads(report.read_text())
    assert doc["schema_version"] == 1
    assert doc["config"]["qubits"] == 2 and doc["config"]["train_frac"] == 0.8
    assert len(doc["loss_history"]) == doc["iterations"]
    assert "test  RMSE" in capsys.readouterr().out


def test_missing_data_is_usage_error(capsys):
    assert main(["train"]) == 2
    assert "usage" in capsys.readouterr().err


@pytest.mark.parametrize("frac", ["0.6", "0.7", "0.8", "0.9"])
def test_train_fractions_accepted(tmp_path, sample, frac):
    assert quick_train(tmp_path, sample, "--train-frac", frac)[0] == 0


def test_bad_fraction(tmp_path, sample):
    assert quick_train(tmp_path, sample, "--train-frac", "1.5")[0] == 2


def test_random_split_mode(tmp_path, sample):
    code, _, report = quick_train(tmp_path, sample, "--split-mode", "random")
    assert code == 0
    assert json.loads(report.read_text())["config"]["split_mode"] == "random"


def test_no_timing_is_byte_identical(tmp_path, sample):
    _, _, report = quick_train(tmp_path, sample, "--no-timing")
    first = report.read_bytes()
    quick_train(tmp_path, sample, "--no-timing")
    assert report.read_bytes() == first
    assert json.loads(first)["wall_time"] is None


def test_predict_from_data(tmp_path, sample):
    _, model, _ = quick_train(tmp_path, sample)
    out = tmp_path / "p.csv"
    assert main(["predict", "--model", str(model), "--data", str(sample), "--out", str(out)]) == 0
    table = rows(out)
    assert table[0] == ["cycle", "measured_ah", "predicted_ah"]
    assert len(table) - 1 == len(load_csv(sample))


def test_predict_range(tmp_path, sample):
    _, model, _ = quick_train(tmp_path, sample)
    out = tmp_path / "p.csv"
    assert main(["predict", "--model", str(model), "--cycles", "1..200", "--out", str(out)]) == 0
    table = rows(out)
    assert table[0] == ["cycle", "predicted_ah"]
    assert len(table) == 201 and table[-1][0] == "200"


def test_predict_corrupt_model(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema_version": 1, "enc')
    assert main(["predict", "--model", str(bad), "--cycles", "1..5"]) == 1
    assert "MalformedModelFile" in capsys.readouterr().err


def test_eval_matches_train_report(tmp_path, sample):
    _, model, report = quick_train(tmp_path, sample)
    out = tmp_path / "e.json"
    assert main(["eval", "--model", str(model), "--data", str(sample), "--out", str(out)]) == 0
    rep, ev = json.loads(report.read_text()), json.loads(out.read_text())
    assert ev["train"] == {"rmse": rep["train_rmse"], "mape": rep["train_mape"]}
    assert ev["test"] == {"rmse": rep["test_rmse"], "mape": rep["test_mape"]}


def test_eval_model_config_wins(tmp_path, sample):
    _, model, report = quick_train(tmp_path, sample)
    out = tmp_path / "e.json"
    assert main(["eval", "--model", str(model), "--data", str(sample), "--qubits", "4",
                 "--depth", "3", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["train"]["rmse"] == json.loads(report.read_text())["train_rmse"]


def test_eval_zero_capacity(tmp_path, sample, capsys):
    _, model, _ = quick_train(tmp_path, sample)
    bad = tmp_path / "zero.csv"
    bad.write_text("# rated_ah=2.0\ncycle,capacity_ah\n1,1.9\n2,0.0\n3,1.8\n4,1.7\n5,1.6\n")
    assert main(["eval", "--model", str(model), "--data", str(bad)]) == 1
    assert "NonPositiveCapacity" in capsys.readouterr().err


def test_sweep_rows_and_determinism(tmp_path, sample):
    out = tmp_path / "s.csv"
    args = ["sweep", "--data", str(sample), "--qubits", "1,2", "--depths", "1,2",
            "--seeds", "1", "--max-iters", "5", "--no-timing", "--out", str(out)]
    assert main(args) == 0
    first = out.read_bytes()
    table = rows(out)
    assert table[0] == SWEEP_HEADER
    assert [tuple(r[:3]) for r in table[1:]] == [("1", "1", "1"), ("1", "2", "1"),
                                                 ("2", "1", "1"), ("2", "2", "1")]
    assert all(r[3] == "ok" for r in table[1:])
    assert main(args) == 0
    assert out.read_bytes() == first


def test_sweep_parallel_ordering(tmp_path, sample):
    serial, parallel = tmp_path / "a.csv", tmp_path / "b.csv"
    base = ["sweep", "--data", str(sample), "--qubits", "2,1", "--depths", "1",
            "--seeds", "2,1", "--max-iters", "5", "--no-timing"]
    assert main(base + ["--out", str(serial)]) == 0
    assert main(base + ["--threads", "2", "--out", str(parallel)]) == 0
    assert serial.read_bytes() == parallel.read_bytes()


def test_sweep_cap(tmp_path, sample, capsys):
    code = main(["sweep", "--data", str(sample), "--qubits", "1,2,3", "--depths", "1,2,3",
                 "--seeds", "1,2,3", "--max-runs", "8", "--out", str(tmp_path / "s.csv")])
    assert code == 2
    assert "cap" in capsys.readouterr().err


def test_sweep_failed_rows(tmp_path, capsys):
    tiny = tmp_path / "tiny.csv"
    tiny.write_text("# rated_ah=2.0\ncycle,capacity_ah\n1,1.9\n2,1.8\n3,1.7\n4,1.6\n5,1.5\n")
    out = tmp_path / "s.csv"
    # 0.9 of 5 records leaves no test data: every run fails
    assert main(["sweep", "--data", str(tiny), "--qubits", "1", "--depths", "1", "--seeds", "1",
                 "--train-frac", "0.9", "--out", str(out)]) == 1
    assert rows(out)[1][3] == "failed"


def test_synth_round_trip(tmp_path):
    out = tmp_path / "syn.csv"
    assert main(["synth", "--out", str(out), "--cycles", "30"]) == 0
    assert len(load_csv(out)) == 30


def test_console_script(tmp_path, sample):
    exe = shutil.which("qnn-capacity")
    cmd = [exe] if exe else [sys.executable, "-m", "qnn_capacity.cli"]
    proc = subprocess.run(cmd + ["predict"], capture_output=True, text=True)
    assert proc.returncode == 2
