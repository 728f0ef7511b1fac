"""Complex matrix/vector kernel and reproducible random streams.

Matrices and vectors are plain numpy arrays (complex128). This module only
adds the handful of operations the simulator is specified against plus a
counter-based RNG wrapper that makes parallel Monte Carlo trials
reproducible independent of scheduling.
"""

import math

import numpy as np

__all__ = [
    "RngStream",
    "kron",
    "hermitian",
    "sample_cgaussian",
    "fixed_order_sum",
]


def kron(a, b):
    """Kronecker product of two 2-D arrays."""
    return np.kron(np.asarray(a), np.asarray(b))


def hermitian(a):
    """Conjugate transpose of a 2-D array."""
    return np.asarray(a).conj().T


class RngStream:
    """Random stream keyed by ``(master_seed, stream_id)``.

    Each key pair selects an independent Philox counter stream, so the
    sample sequence is a pure function of the key: identical keys give
    identical draws on every platform and thread schedule. Parallel tasks
    each construct their own stream instead of sharing generator state.
    """

    def __init__(self, master_seed, stream_id=0):
        self.master_seed = int(master_seed)
        self.stream_id = int(stream_id)
        if self.master_seed < 0 or self.stream_id < 0:
            raise ValueError("master_seed and stream_id must be nonnegative")
        key = np.array([self.master_seed, self.stream_id], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def substream(self, stream_id):
        """Fresh stream under the same master seed."""
        return RngStream(self.master_seed, stream_id)

    def standard_normal(self, size=None):
        return self._gen.standard_normal(size)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._gen.uniform(low, high, size)

    def __repr__(self):
        return f"RngStream(master_seed={self.master_seed}, stream_id={self.stream_id})"


def sample_cgaussian(dim, variance, rng):
    """Circularly-symmetric complex Gaussian vector.

    Entries are i.i.d. with real and imaginary parts each
    N(0, variance/2), so E|entry|^2 = variance.
    """
    if variance < 0:
        raise ValueError(f"variance must be nonnegative, got {variance}")
    if dim < 0:
        raise ValueError(f"dim must be nonnegative, got {dim}")
    if variance == 0:
        return np.zeros(dim, dtype=complex)
    z = rng.standard_normal(2 * dim)
    return math.sqrt(variance / 2.0) * (z[:dim] + 1j * z[dim:])


def fixed_order_sum(values):
    """Sum in a fixed, input-independent order.

    Used to reduce per-trial results after parallel fan-out: the result is
    bit-identical for any worker count because the reduction never depends
    on completion order. Compensated summation also makes it exact for
    float inputs.
    """
    if isinstance(values, np.ndarray):
        values = values.tolist()
    return math.fsum(values)
