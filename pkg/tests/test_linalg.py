"""Tests for the complex kernel and the seeded stream contract."""

import math

import numpy as np
import pytest

from ris_chanest import (
    RngStream,
    fixed_order_sum,
    hermitian,
    kron,
    sample_cgaussian,
)


class TestKron:
    def test_identity_blocks(self):
        assert np.array_equal(kron(np.eye(2), np.eye(3)), np.eye(6))

    def test_scalar_factor(self):
        b = np.array([[1 + 2j, 3], [0, -1j]])
        assert np.array_equal(kron([[2]], b), 2 * b)

    def test_swap_block_permutes_stacked_vector(self):
        # [[0,1],[1,0]] kron I_2 applied to [a; b] swaps the two halves
        swap = kron(np.array([[0, 1], [1, 0]]), np.eye(2))
        vec = np.array([1 + 1j, 2, 3, 4 - 2j])
        assert np.allclose(swap @ vec, np.concatenate([vec[2:], vec[:2]]))

    def test_mixed_product_rule(self):
        rng = np.random.default_rng(1234)
        for _ in range(10):
            a = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
            b = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
            c = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
            d = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
            lhs = kron(a, b) @ kron(c, d)
            rhs = kron(a @ c, b @ d)
            assert np.max(np.abs(lhs - rhs)) < 1e-10

    def test_hermitian_commutes_with_kron_identity(self):
        a = np.array([[1 + 1j, 2 - 1j], [0.5j, 3]])
        assert np.array_equal(hermitian(kron(a, np.eye(3))), kron(hermitian(a), np.eye(3)))


class TestHermitian:
    def test_identity(self):
        assert np.array_equal(hermitian(np.eye(3)), np.eye(3))

    def test_conjugates_scalar(self):
        assert hermitian(np.array([[1j]]))[0, 0] == -1j

    def test_shape_and_entries(self):
        a = np.arange(6).reshape(2, 3) + 1j
        out = hermitian(a)
        assert out.shape == (3, 2)
        assert np.array_equal(out, a.T.conj())
        assert np.array_equal(hermitian(out), a)


class TestSampleCGaussian:
    def test_zero_variance_gives_zero_vector(self):
        out = sample_cgaussian(5, 0.0, RngStream(1, 0))
        assert np.array_equal(out, np.zeros(5, dtype=complex))

    def test_mean_power_matches_variance(self):
        out = sample_cgaussian(100_000, 1.0, RngStream(3, 0))
        assert 0.99 <= np.mean(np.abs(out) ** 2) <= 1.01

    def test_determinism_per_key(self):
        a = sample_cgaussian(64, 2.0, RngStream(7, 1))
        b = sample_cgaussian(64, 2.0, RngStream(7, 1))
        assert np.array_equal(a, b)

    def test_different_stream_ids_differ(self):
        a = sample_cgaussian(64, 1.0, RngStream(7, 1))
        b = sample_cgaussian(64, 1.0, RngStream(7, 2))
        assert not np.allclose(a, b)

    def test_rejects_negative_variance(self):
        with pytest.raises(ValueError):
            sample_cgaussian(4, -0.1, RngStream(0, 0))

    def test_empirical_covariance_is_white(self):
        dim, draws, variance = 8, 10_000, 2.0
        rng = RngStream(11, 0)
        samples = np.array([sample_cgaussian(dim, variance, rng) for _ in range(draws)])
        cov = samples.conj().T @ samples / draws
        diag = np.real(np.diag(cov))
        assert np.all(np.abs(diag - variance) < 0.05 * variance)
        off = cov - np.diag(np.diag(cov))
        assert np.max(np.abs(off)) < 0.05 * variance


class TestFixedOrderSum:
    def test_empty(self):
        assert fixed_order_sum([]) == 0.0

    def test_small_integers(self):
        assert fixed_order_sum([1.0, 2.0, 3.0]) == 6.0

    def test_bit_identical_regardless_of_fill_chunking(self):
        # Emulate parallel fan-in: the same per-trial values written into the
        # pre-sized array by 4 or 8 workers reduce to the same bits.
        values = np.random.default_rng(5).uniform(0.0, 1.0, 1000)
        for workers in (4, 8):
            filled = np.empty_like(values)
            bounds = np.linspace(0, len(values), workers + 1, dtype=int)
            for lo, hi in zip(bounds[:-1], bounds[1:]):
                filled[lo:hi] = values[lo:hi]
            assert fixed_order_sum(filled) == fixed_order_sum(values)

    def test_accepts_ndarray(self):
        assert fixed_order_sum(np.array([0.1] * 10)) == math.fsum([0.1] * 10)
