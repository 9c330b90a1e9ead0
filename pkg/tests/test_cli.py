"""Command-line interface: file products, manifest contract, exit codes."""

import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from sparse_pielm.mmio import read_matrix_market, write_matrix_market

from conftest import dense_of, random_sparse


def run_cli(args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "sparse_pielm.cli", *args],
        cwd=cwd,
        capture_output=True,
        text=True,
    )


def load_manifest(out_dir):
    with open(out_dir / "manifest.json") as fh:
        return json.load(fh)


class TestGen:
    def test_hard_matrix_with_sidecar(self, tmp_path):
        proc = run_cli(
            ["--out-dir", str(tmp_path), "--seed", "3", "gen", "--kind", "hard",
             "--m", "60", "--n", "40", "--rank", "10", "-o", "hard.mtx"],
            tmp_path,
        )
        assert proc.returncode == 0, proc.stderr
        A = read_matrix_market(tmp_path / "hard.mtx")
        assert A.shape == (60, 40)
        sidecar = (tmp_path / "hard.mtx.spec").read_text()
        assert "rank = 10" in sidecar and "seed = 3" in sidecar
        manifest = load_manifest(tmp_path)
        assert manifest["command"] == "gen"
        assert manifest["seed"] == 3
        assert any(p.endswith("hard.mtx") for p in manifest["output_paths"])
        assert manifest["wall_time_s"] >= 0

    def test_random_matrix_density(self, tmp_path):
        proc = run_cli(
            ["--out-dir", str(tmp_path), "gen", "--kind", "random",
             "--m", "50", "--n", "40", "--density", "0.1", "-o", "r.mtx"],
            tmp_path,
        )
        assert proc.returncode == 0, proc.stderr
        A = read_matrix_market(tmp_path / "r.mtx")
        assert A.nnz == round(50 * 40 * 0.1)


class TestSvd:
    @pytest.fixture
    def matrix_file(self, tmp_path):
        A = random_sparse(40, 25, 0.3, 7)
        path = tmp_path / "m.mtx"
        write_matrix_market(A, path)
        return A, path

    def test_spectrum_matches_dense_oracle(self, tmp_path, matrix_file):
        A, path = matrix_file
        proc = run_cli(
            ["--out-dir", str(tmp_path), "svd", str(path), "--k", "25"], tmp_path
        )
        assert proc.returncode == 0, proc.stderr
        with open(tmp_path / "spectrum.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        got = np.array([float(r["sigma"]) for r in rows])
        s_true = np.linalg.svd(dense_of(A), compute_uv=False)
        keep = s_true > 1e-10 * s_true[0]
        np.testing.assert_allclose(got[: keep.sum()], s_true[keep], rtol=1e-8)
        manifest = load_manifest(tmp_path)
        assert str(path) in manifest["input_paths"]

    def test_trace_and_gram_dumps(self, tmp_path, matrix_file):
        A, path = matrix_file
        proc = run_cli(
            ["--out-dir", str(tmp_path), "svd", str(path), "--k", "10",
             "--trace", "trace.csv", "--dump-gram", "gram"],
            tmp_path,
        )
        assert proc.returncode == 0, proc.stderr
        with open(tmp_path / "trace.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 10
        uu = read_matrix_market(tmp_path / "gram_uu.mtx")
        vv = read_matrix_market(tmp_path / "gram_vv.mtx")
        np.testing.assert_allclose(dense_of(uu), np.eye(10), atol=1e-10)
        np.testing.assert_allclose(dense_of(vv), np.eye(10), atol=1e-10)

    def test_missing_input_exits_2_with_manifest_error(self, tmp_path):
        proc = run_cli(["--out-dir", str(tmp_path), "svd", "nope.mtx"], tmp_path)
        assert proc.returncode == 2
        manifest = load_manifest(tmp_path)
        assert "error" in manifest


class TestDiagnose:
    def test_exact_counts(self, tmp_path):
        A = random_sparse(30, 30, 0.2, 5)
        path = tmp_path / "d.mtx"
        write_matrix_market(A, path)
        proc = run_cli(["--out-dir", str(tmp_path), "diagnose", str(path)], tmp_path)
        assert proc.returncode == 0, proc.stderr
        with open(tmp_path / "diagnostics.csv", newline="") as fh:
            rows = {r["metric"]: r["value"] for r in csv.DictReader(fh)}
        assert int(rows["nnz"]) == A.nnz
        assert float(rows["density"]) == pytest.approx(A.nnz / 900)
        s = np.linalg.svd(dense_of(A), compute_uv=False)
        assert float(rows["max_singular"]) == pytest.approx(s[0], rel=1e-10)


class TestSolvePde:
    def test_easy_problem_end_to_end(self, tmp_path):
        proc = run_cli(
            ["--out-dir", str(tmp_path), "solve-pde", "--pe", "-50", "--nodes", "200",
             "--collocations", "400", "--width", "1e-3", "--drop-tol", "1e-10",
             "--grid", "2001"],
            tmp_path,
        )
        assert proc.returncode == 0, proc.stderr
        with open(tmp_path / "errors.csv", newline="") as fh:
            errs = {r["metric"]: float(r["value"]) for r in csv.DictReader(fh)}
        assert errs["linf"] <= 1e-5
        assert errs["boundary_err"] <= 1e-6
        for name in ("solution.csv", "solve_report.csv", "diagnostics.csv"):
            assert (tmp_path / name).exists()
        with open(tmp_path / "solution.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 2001
        manifest = load_manifest(tmp_path)
        assert manifest["config"]["pe"] == -50.0
        assert manifest["config"]["width"] == 1e-3

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "pe = -50\nnodes = 150\ncollocations = 300\nwidth = 1e-3\n"
            "drop_tol = 1e-10\ngrid = 501\nsvd.trunc_eps = 1e-12\n"
        )
        proc = run_cli(
            ["--out-dir", str(tmp_path), "--config", str(cfg),
             "solve-pde", "--nodes", "180"],
            tmp_path,
        )
        assert proc.returncode == 0, proc.stderr
        manifest = load_manifest(tmp_path)
        assert manifest["config"]["nodes"] == 180  # flag beats config file
        assert manifest["config"]["pe"] == -50.0  # config beats default
        assert manifest["config"]["svd.trunc_eps"] == 1e-12

    def test_dump_system_is_readable(self, tmp_path):
        proc = run_cli(
            ["--out-dir", str(tmp_path), "solve-pde", "--pe", "-10", "--nodes", "50",
             "--collocations", "100", "--width", "1e-2", "--grid", "101",
             "--dump-system", "system.mtx"],
            tmp_path,
        )
        assert proc.returncode == 0, proc.stderr
        H = read_matrix_market(tmp_path / "system.mtx")
        assert H.shape == (102, 50)
