"""Dense test oracles.

These deliberately materialize the full Kronecker-structured operators
that the library never forms, so every structured estimator can be
checked against an independent computation path.
"""

import numpy as np

from ris_chanest import kron


def dense_ls_estimate(pattern_matrix, y_tilde, m):
    """LS estimate via the dense pseudo-inverse of the stacked model matrix."""
    a = kron(pattern_matrix, np.eye(m))
    return np.linalg.pinv(a) @ y_tilde


def densify_prior(prior):
    """Materialize the block-diagonal composite-channel covariance."""
    m, n = prior.m, prior.n
    size = m * (n + 1)
    cov = np.zeros((size, size), dtype=complex)
    cov[:m, :m] = prior.beta_bs * np.eye(m)
    for j in range(n):
        b = prior.los_columns[:, j]
        block = prior.beta_irs * np.outer(b, b.conj())
        lo = m * (j + 1)
        cov[lo : lo + m, lo : lo + m] = block
    return cov


def dense_mmse_estimate(prior, noise, r):
    """MMSE estimate via the dense covariance solve."""
    cov = densify_prior(prior)
    size = cov.shape[0]
    shrunk = cov + (noise.n0 / noise.tau_p) * np.eye(size)
    return cov @ np.linalg.solve(shrunk, r)


def random_unit_modulus(rng, size):
    """Unit-modulus complex phasors with uniform phases."""
    return np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size))
