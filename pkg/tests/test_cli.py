import json

import numpy as np
import pytest

from radreg.cli import main
from radreg.data import load_dataset_csv


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSynthCorrupt:
    def test_synth_writes_dataset(self, tmp_path, capsys):
        out = tmp_path / "data.csv"
        code, stdout, _ = run_cli(capsys, "synth", "--d", "3", "--n", "25",
                                  "--seed", "7", "--out", str(out))
        assert code == 0
        meta = json.loads(stdout)
        assert meta["rows"] == 25 and meta["d"] == 3
        ds = load_dataset_csv(out)
        assert ds.m == 25

    def test_synth_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run_cli(capsys, "synth", "--d", "2", "--n", "10", "--seed", "3", "--out", str(a))
        run_cli(capsys, "synth", "--d", "2", "--n", "10", "--seed", "3", "--out", str(b))
        assert a.read_text() == b.read_text()

    def test_corrupt_gated(self, tmp_path, capsys):
        data = tmp_path / "clean.csv"
        run_cli(capsys, "synth", "--d", "4", "--n", "200", "--seed", "1",
                "--out", str(data))
        out = tmp_path / "noisy.csv"
        record = tmp_path / "record.json"
        code, stdout, _ = run_cli(capsys, "corrupt", "--in", str(data),
                                  "--eta", "0.3", "--strategy", "gated-flip:2",
                                  "--seed", "5", "--out", str(out),
                                  "--record-out", str(record))
        assert code == 0
        summary = json.loads(stdout)
        assert 0 < summary["corrupted"] <= summary["corruptible"]
        rec = json.loads(record.read_text())
        assert sum(rec["mask"]) == summary["corrupted"]


class TestFitCommands:
    def make_linear_csv(self, tmp_path, capsys, w_star="2,-3"):
        data = tmp_path / "lin.csv"
        run_cli(capsys, "synth", "--d", "2", "--n", "40", "--seed", "2",
                "--w-star", w_star, "--out", str(data))
        return data

    def test_fit_linear_recovers(self, tmp_path, capsys):
        data = self.make_linear_csv(tmp_path, capsys)
        report_path = tmp_path / "report.json"
        code, _, _ = run_cli(capsys, "fit-linear", "--in", str(data),
                             "--out", str(report_path))
        assert code == 0
        report = json.loads(report_path.read_text())
        assert report["w_snapped"]["values"] == [2.0, -3.0]
        assert report["majority_certified"] is True

    def test_fit_relu(self, tmp_path, capsys):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((150, 2)) + 1.0
        w_star = np.array([2.0, 1.0])
        y = np.maximum(X @ w_star, 0.0)
        data = tmp_path / "relu.csv"
        from radreg.data import LabeledDataset, save_dataset_csv
        save_dataset_csv(LabeledDataset(X, y), data)
        code, stdout, _ = run_cli(capsys, "fit-relu", "--in", str(data),
                                  "--radius", "5", "--max-denominator", "8")
        assert code == 0
        report = json.loads(stdout)
        assert report["w_snapped"]["values"] == [2.0, 1.0]

    def test_gd_relu_trajectory(self, tmp_path, capsys):
        data = tmp_path / "gd.csv"
        run_cli(capsys, "synth", "--d", "3", "--n", "60", "--seed", "4",
                "--model", "relu", "--out", str(data))
        traj = tmp_path / "traj.csv"
        code, stdout, _ = run_cli(capsys, "gd-relu", "--in", str(data),
                                  "--mode", "radial-isotropic", "--iters", "10",
                                  "--w-star", "1,10,1", "--out", str(traj))
        assert code == 0
        lines = traj.read_text().strip().splitlines()
        assert lines[0] == "iter,loss,distance"
        assert len(lines) == 11
        summary = json.loads(stdout)
        assert summary["iters"] == 10


class TestBenchEval:
    def test_bench_recovery_rate(self, tmp_path, capsys):
        out = tmp_path / "bench.json"
        code, _, _ = run_cli(capsys, "bench", "recovery-rate", "--d", "2",
                             "--n", "30", "--eta-grid", "0,0.2", "--trials", "3",
                             "--seed", "6", "--methods", "naive-l1",
                             "--out", str(out))
        assert code == 0
        report = json.loads(out.read_text())
        assert len(report["rows"]) == 2
        assert report["rows"][0]["recovery_rate"] == 1.0  # eta = 0

    def test_eval_margin(self, tmp_path, capsys):
        data = tmp_path / "test.csv"
        run_cli(capsys, "synth", "--d", "2", "--n", "20", "--seed", "8",
                "--w-star", "1,2", "--out", str(data))
        code, stdout, _ = run_cli(capsys, "eval", "margin", "--in", str(data),
                                  "--w", "1,2", "--margin", "0")
        assert code == 0
        assert json.loads(stdout)["fraction"] == 1.0


class TestErrorContract:
    def test_missing_file_gives_json_error(self, capsys):
        code, stdout, stderr = run_cli(capsys, "fit-linear", "--in",
                                       "/nonexistent/nope.csv")
        assert code != 0
        err = json.loads(stderr)
        assert "error" in err and "message" in err

    def test_malformed_csv_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("x1,y\n1.0,zap\n")
        code, _, stderr = run_cli(capsys, "fit-linear", "--in", str(bad))
        assert code != 0
        assert json.loads(stderr)["error"] == "MalformedCsv"
