"""Deterministic benchmark matrix generators."""

import numpy as np
import pytest

from sparse_pielm.benchgen import HardMatrixSpec, gen_hard, gen_random_sparse, write_sidecar

from conftest import dense_of


class TestHardMatrix:
    def test_clean_spectrum_is_inverse_sqrt(self):
        spec = HardMatrixSpec(m=120, n=80, rank=30, eps=0.0, rho=0.01, seed=4)
        A = gen_hard(spec)
        s = np.linalg.svd(dense_of(A), compute_uv=False)
        expected = 1.0 / np.sqrt(np.arange(1, 31))
        np.testing.assert_allclose(s[:30], expected, rtol=1e-12)
        assert np.all(s[30:] <= 1e-12)

    def test_deterministic_per_seed(self):
        spec = HardMatrixSpec(m=40, n=30, rank=10, seed=7)
        A = gen_hard(spec)
        B = gen_hard(spec)
        np.testing.assert_array_equal(dense_of(A), dense_of(B))
        C = gen_hard(HardMatrixSpec(m=40, n=30, rank=10, seed=8))
        assert not np.array_equal(dense_of(A), dense_of(C))

    def test_noise_is_additive_with_expected_density(self):
        clean_spec = HardMatrixSpec(m=200, n=150, rank=20, eps=0.0, rho=0.05, seed=3)
        noisy_spec = HardMatrixSpec(m=200, n=150, rank=20, eps=1e-3, rho=0.05, seed=3)
        diff = dense_of(gen_hard(noisy_spec)) - dense_of(gen_hard(clean_spec))
        nnz = np.count_nonzero(diff)
        expected = 0.05 * 200 * 150
        assert abs(nnz - expected) <= 4 * np.sqrt(expected)
        assert np.abs(diff).max() <= 1e-3 * 6  # eps times a few std normal widths

    def test_rejects_invalid_spec(self):
        with pytest.raises(ValueError):
            HardMatrixSpec(m=10, n=5, rank=6)
        with pytest.raises(ValueError):
            HardMatrixSpec(m=10, n=5, rank=2, rho=1.5)

    def test_fields_dict_round_trips_through_sidecar(self, tmp_path):
        spec = HardMatrixSpec(m=12, n=9, rank=3, eps=0.5, rho=0.2, seed=11)
        path = tmp_path / "mat.mtx.spec"
        write_sidecar(path, spec.fields())
        parsed = {}
        for line in path.read_text().splitlines():
            key, _, value = line.partition("=")
            parsed[key.strip()] = value.strip()
        assert int(parsed["m"]) == 12
        assert int(parsed["rank"]) == 3
        assert float(parsed["eps"]) == 0.5


class TestRandomSparse:
    @pytest.mark.parametrize("m,n,density", [(50, 40, 0.1), (30, 30, 0.02), (10, 10, 1.0)])
    def test_exact_nnz(self, m, n, density):
        A = gen_random_sparse(m, n, density, seed=0)
        assert A.nnz == round(m * n * density)
        assert A.shape == (m, n)

    def test_deterministic_and_seed_sensitive(self):
        A = gen_random_sparse(40, 25, 0.1, seed=5)
        B = gen_random_sparse(40, 25, 0.1, seed=5)
        np.testing.assert_array_equal(dense_of(A), dense_of(B))
        C = gen_random_sparse(40, 25, 0.1, seed=6)
        assert not np.array_equal(dense_of(A), dense_of(C))

    def test_values_are_nonzero(self):
        A = gen_random_sparse(60, 60, 0.05, seed=9)
        assert np.all(A.values != 0.0)
