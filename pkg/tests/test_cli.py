"""Command-line behavior: flags, formats, exit codes, determinism."""

import csv
import io
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from diemkit import load_calibration

ENTRY = [sys.executable, "-m", "diemkit.cli"]


def run_cli(*args, env=None):
    full_env = dict(os.environ)
    full_env.pop("DIEM_SEED", None)
    if env:
        full_env.update(env)
    return subprocess.run(ENTRY + list(args), capture_output=True, text=True, env=full_env)


def write_vectors(path, rows):
    path.write_text("\n".join(",".join(str(x) for x in row) for row in rows) + "\n")


@pytest.fixture(scope="module")
def cal_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cal") / "cal12.txt"
    res = run_cli("calibrate", "--n", "12", "--vmin", "0", "--vmax", "1",
                  "--domain", "positive", "--trials", "100000", "--seed", "7",
                  "--out", str(path))
    assert res.returncode == 0, res.stderr
    return path


class TestCalibrateCommand:
    def test_writes_reference_constants(self, cal_file):
        cal = load_calibration(cal_file)
        assert cal.var_ed == pytest.approx(0.06, abs=0.01)

    def test_missing_required_flag_is_usage_error(self):
        res = run_cli("calibrate", "--vmin", "0", "--out", "/tmp/nope.txt")
        assert res.returncode == 1
        assert res.stdout == ""

    def test_repeat_runs_are_byte_identical(self, tmp_path):
        p1, p2 = tmp_path / "a.txt", tmp_path / "b.txt"
        for p in (p1, p2):
            res = run_cli("calibrate", "--n", "4", "--trials", "2000",
                          "--seed", "9", "--out", str(p))
            assert res.returncode == 0, res.stderr
        assert p1.read_bytes() == p2.read_bytes()

    def test_env_seed_fallback(self, tmp_path):
        p1, p2 = tmp_path / "a.txt", tmp_path / "b.txt"
        res = run_cli("calibrate", "--n", "4", "--trials", "2000",
                      "--seed", "33", "--out", str(p1))
        assert res.returncode == 0
        res = run_cli("calibrate", "--n", "4", "--trials", "2000", "--out", str(p2),
                      env={"DIEM_SEED": "33"})
        assert res.returncode == 0
        assert p1.read_bytes() == p2.read_bytes()


class TestCompareCommand:
    def test_euclidean_three_four_five(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_vectors(a, [["p", 0, 0]])
        write_vectors(b, [["q", 3, 4]])
        res = run_cli("compare", "--a", str(a), "--b", str(b), "--metric", "euclid")
        assert res.returncode == 0
        assert float(res.stdout.strip()) == 5.0

    def test_cosine_orthogonal(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_vectors(a, [["p", 1, 0]])
        write_vectors(b, [["q", 0, 1]])
        res = run_cli("compare", "--a", str(a), "--b", str(b), "--metric", "cosine")
        assert res.returncode == 0
        assert float(res.stdout.strip()) == 0.0

    def test_diem_identical_vector_prints_lower_bound(self, tmp_path, cal_file):
        a = tmp_path / "a.csv"
        write_vectors(a, [["p"] + [0.5] * 12])
        res = run_cli("compare", "--a", str(a), "--b", str(a), "--metric", "diem",
                      "--calibration", str(cal_file))
        assert res.returncode == 0
        cal = load_calibration(cal_file)
        assert float(res.stdout.strip()) == cal.diem_min

    def test_one_value_per_pair(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_vectors(a, [["p", 1, 0], ["q", 0, 2], ["r", 3, 3]])
        write_vectors(b, [["x", 1, 0], ["y", 0, 5], ["z", 3, 3]])
        res = run_cli("compare", "--a", str(a), "--b", str(b), "--metric", "manhattan")
        assert res.returncode == 0
        assert [float(v) for v in res.stdout.split()] == [0.0, 3.0, 0.0]

    def test_diem_without_calibration_is_usage_error(self, tmp_path):
        a = tmp_path / "a.csv"
        write_vectors(a, [["p", 1, 0]])
        res = run_cli("compare", "--a", str(a), "--b", str(a), "--metric", "diem")
        assert res.returncode == 1

    def test_missing_file_is_data_error(self, tmp_path):
        res = run_cli("compare", "--a", str(tmp_path / "none.csv"),
                      "--b", str(tmp_path / "none.csv"))
        assert res.returncode == 2

    def test_ragged_file_is_data_error(self, tmp_path):
        a = tmp_path / "a.csv"
        a.write_text("p,1,2\nq,1\n")
        res = run_cli("compare", "--a", str(a), "--b", str(a))
        assert res.returncode == 2
        assert "line 2" in res.stderr


class TestSweepCommand:
    def test_header_and_convergence(self, tmp_path):
        out = tmp_path / "sweep.csv"
        res = run_cli("sweep", "--metric", "cosine", "--domain", "positive",
                      "--dims", "2,102", "--trials", "10000", "--seed", "3",
                      "--out", str(out))
        assert res.returncode == 0, res.stderr
        rows = list(csv.DictReader(io.StringIO(out.read_text())))
        assert list(rows[0].keys()) == ["dim", "count", "mean", "std", "median", "q1",
                                        "q3", "whisker_low", "whisker_high",
                                        "outlier_count"]
        last = rows[-1]
        assert last["dim"] == "102"
        assert float(last["mean"]) == pytest.approx(0.75, abs=0.05)

    def test_diem_sweep_variance_is_flat(self, tmp_path):
        out = tmp_path / "diem.csv"
        res = run_cli("sweep", "--metric", "diem", "--domain", "positive",
                      "--dims", "22,62,102", "--trials", "5000",
                      "--calibration-trials", "20000", "--seed", "3", "--out", str(out))
        assert res.returncode == 0, res.stderr
        rows = list(csv.DictReader(io.StringIO(out.read_text())))
        stds = [float(r["std"]) for r in rows]
        assert max(stds) / min(stds) < 1.1

    def test_unsorted_dims_is_usage_error(self):
        res = run_cli("sweep", "--dims", "10,5,20")
        assert res.returncode == 1

    def test_stdout_when_no_out_flag(self):
        res = run_cli("sweep", "--dims", "2,12", "--trials", "200", "--seed", "1")
        assert res.returncode == 0
        assert res.stdout.startswith("dim,count,mean")


class TestNormalityCommand:
    def test_rejects_at_dim_two(self, tmp_path):
        out = tmp_path / "norm.csv"
        res = run_cli("normality", "--domain", "positive", "--dims", "2,12",
                      "--trials", "10000", "--alpha", "0.05", "--seed", "5",
                      "--out", str(out))
        assert res.returncode == 0, res.stderr
        rows = {r["dim"]: r for r in csv.DictReader(io.StringIO(out.read_text()))}
        assert rows["2"]["rejected"] == "true"
        assert rows["12"]["rejected"] == "false"


class TestEmbeddingsCommand:
    def test_pairwise_identical_files(self, tmp_path, cal_file):
        vecs = tmp_path / "v.csv"
        rng = np.random.default_rng(11)
        write_vectors(vecs, [[f"r{i}"] + list(rng.uniform(size=12)) for i in range(8)])
        res = run_cli("embeddings", "--input", str(vecs), "--input", str(vecs),
                      "--mode", "pairwise", "--metric", "diem",
                      "--calibration", str(cal_file))
        assert res.returncode == 0, res.stderr
        doc = dict(l.split(" = ", 1) for l in res.stdout.splitlines())
        cal = load_calibration(cal_file)
        assert float(doc["most_similar_value"]) == cal.diem_min
        assert float(doc["most_dissimilar_value"]) == cal.diem_min

    def test_allpairs_with_zref(self, tmp_path, cal_file):
        vecs = tmp_path / "v.csv"
        rng = np.random.default_rng(12)
        write_vectors(vecs, [[f"r{i}"] + list(rng.uniform(size=12)) for i in range(12)])
        res = run_cli("embeddings", "--input", str(vecs), "--mode", "allpairs",
                      "--metric", "diem", "--calibration", str(cal_file),
                      "--zref", "0,2.0248")
        assert res.returncode == 0, res.stderr
        doc = dict(l.split(" = ", 1) for l in res.stdout.splitlines())
        assert "z_statistic" in doc
        assert doc["count"] == str(12 * 11 // 2)

    def test_pairwise_needs_two_inputs(self, tmp_path):
        vecs = tmp_path / "v.csv"
        write_vectors(vecs, [["a", 1, 2]])
        res = run_cli("embeddings", "--input", str(vecs), "--mode", "pairwise")
        assert res.returncode == 1

    def test_diagnostics_go_to_stderr(self, tmp_path):
        out = tmp_path / "c.txt"
        res = run_cli("calibrate", "--n", "3", "--trials", "2000", "--out", str(out))
        assert res.returncode == 0
        assert res.stdout == ""
        assert str(out) in res.stderr


def test_math_sanity():
    # exit-code table sanity: sqrt(4.1) is the documented sigma for --zref
    assert math.sqrt(4.1) == pytest.approx(2.0248, abs=1e-4)
