"""Channel estimators and their closed-form NMSE predictions.

All estimators exploit the Kronecker structure of the stacked pilot model
and work blockwise on length-M segments; the m(n+1) x m(n+1) operators
they represent are never materialized. Dense counterparts exist only as
test oracles.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Estimate",
    "NoiseModel",
    "ESTIMATOR_NAMES",
    "mvu_onoff",
    "mvu_dft",
    "mmse",
    "mmse_direct",
    "predict_nmse",
]

ESTIMATOR_NAMES = ("mvu-onoff", "mvu-dft", "mmse")
GROUPS = ("direct", "cascade")


@dataclass
class Estimate:
    """Composite-channel estimate.

    Block 0 of ``h_hat`` is the direct-channel estimate, blocks 1..N the
    cascade columns. ``per_block_sq_error`` is filled by the Monte Carlo
    harness once the true channel is known.
    """

    h_hat: np.ndarray  # (m*(n+1),)
    per_block_sq_error: np.ndarray | None = None


@dataclass(frozen=True)
class NoiseModel:
    """Noise level n0 and pilot count; the LS output noise variance is n0/tau_p."""

    n0: float
    tau_p: int

    def __post_init__(self):
        if self.n0 < 0:
            raise ValueError(f"n0 must be nonnegative, got {self.n0}")
        if self.tau_p < 1:
            raise ValueError(f"tau_p must be positive, got {self.tau_p}")

    @property
    def ls_variance(self):
        return self.n0 / self.tau_p


def _deblock(y_tilde, tau_p):
    """View the stacked observation as (tau_p, m) with row t = pilot-t block."""
    y_tilde = np.asarray(y_tilde)
    if y_tilde.ndim != 1 or y_tilde.size % tau_p:
        raise ValueError(
            f"observation length {y_tilde.size} is not a multiple of tau_p={tau_p}"
        )
    return y_tilde.reshape(tau_p, y_tilde.size // tau_p)


def mvu_onoff(y_tilde, pattern):
    """LS estimate under the on-off activation pattern.

    The pattern matrix is unit lower-triangular with closed-form inverse,
    so the estimate is: direct block = first observation block, cascade
    block n = observation block n minus the first. The direct-channel
    noise therefore leaks into every cascade estimate, doubling its error.
    """
    if pattern.kind != "onoff":
        raise ValueError(f"mvu_onoff requires an onoff pattern, got {pattern.kind!r}")
    blocks = _deblock(y_tilde, pattern.tau_p)
    h = np.empty_like(blocks)
    h[0] = blocks[0]
    h[1:] = blocks[1:] - blocks[0]
    return Estimate(h_hat=h.ravel())


def mvu_dft(y_tilde, pattern):
    """LS estimate under the DFT activation pattern.

    Because the pattern's Gram matrix is tau_p * I, the estimator reduces
    to correlating the observation blocks against each (conjugated) DFT
    column and dividing by tau_p: for each of the M antenna positions this
    is an independent length-tau_p inner product per output block.
    """
    if pattern.kind != "dft":
        raise ValueError(f"mvu_dft requires a dft pattern, got {pattern.kind!r}")
    blocks = _deblock(y_tilde, pattern.tau_p)
    h = pattern.matrix.conj().T @ blocks / pattern.tau_p  # (n+1, m)
    return Estimate(h_hat=h.ravel())


def mmse_direct(r_head, beta_bs, noise):
    """Bayesian shrinkage of the direct block of the LS output.

    The direct-channel prior is a scaled identity, so the estimator is the
    scalar gain beta_bs / (beta_bs + n0/tau_p).
    """
    r_head = np.asarray(r_head)
    c = noise.ls_variance
    denom = beta_bs + c
    gain = beta_bs / denom if denom > 0 else 0.0
    return gain * r_head


def mmse(r, prior, noise):
    """MMSE estimate of the composite channel from the LS output ``r``.

    Parameters
    ----------
    r : ndarray
        Output of :func:`mvu_dft`, distributed as channel + white noise of
        variance n0/tau_p.
    prior : PriorCovariance
        Structured composite-channel covariance (true LoS matrix and path
        losses).
    noise : NoiseModel

    The block-diagonal prior decouples the solve: the direct block is
    scalar shrinkage, and each rank-one cascade block reduces, via the
    rank-one resolvent identity, to projecting onto its LoS column with
    gain beta_irs / (n0/tau_p + beta_irs * ||b_n||^2). At zero noise the
    direct gain is 1 and each cascade block becomes the orthogonal
    projection onto span(b_n).
    """
    r = np.asarray(r)
    m, n = prior.m, prior.n
    if r.shape != (m * (n + 1),):
        raise ValueError(f"expected r of length {m * (n + 1)}, got {r.shape}")
    blocks = r.reshape(n + 1, m)
    out = np.empty_like(blocks)
    out[0] = mmse_direct(blocks[0], prior.beta_bs, noise)

    b = prior.los_columns  # (m, n)
    c = noise.ls_variance
    corr = np.sum(b.conj() * blocks[1:].T, axis=0)  # b_n^H r_n, (n,)
    denom = c + prior.beta_irs * np.sum(np.abs(b) ** 2, axis=0)
    coef = np.divide(
        prior.beta_irs * corr,
        denom,
        out=np.zeros_like(corr),
        where=denom > 0,
    )
    out[1:] = (b * coef[None, :]).T
    return Estimate(h_hat=out.ravel())


def predict_nmse(estimator, group, losses, noise, m=None):
    """Closed-form NMSE for one estimator and channel group.

    Parameters
    ----------
    estimator : str
        One of ``mvu-onoff``, ``mvu-dft``, ``mmse``.
    group : str
        ``direct`` or ``cascade`` (cascade values are identical for every
        column, so they equal the column average).
    losses : PathLosses
    noise : NoiseModel
    m : int, optional
        Antenna count; required only for the MMSE cascade prediction.

    Returns
    -------
    float
        Predicted error-covariance trace over prior-covariance trace for
        one block. The on-off forms follow from the diagonal (1, 2, .., 2)
        of the inverse-pattern Gram matrix; the DFT/MMSE forms from the
        white LS error covariance and the rank-one posterior.
    """
    if estimator not in ESTIMATOR_NAMES:
        raise ValueError(f"unknown estimator {estimator!r}")
    if group not in GROUPS:
        raise ValueError(f"unknown channel group {group!r}")
    n0, tau_p = noise.n0, noise.tau_p
    if n0 == 0:
        return 0.0
    beta_cas = losses.beta_cascade
    if estimator == "mvu-dft":
        if group == "direct":
            return n0 / (tau_p * losses.beta_bs)
        return n0 / (tau_p * beta_cas)
    if estimator == "mvu-onoff":
        if group == "direct":
            return n0 / losses.beta_bs
        return 2.0 * n0 / beta_cas
    # mmse
    if group == "direct":
        return n0 / (tau_p * losses.beta_bs + n0)
    if m is None:
        raise ValueError("antenna count m is required for the mmse cascade prediction")
    return n0 / (tau_p * m * beta_cas + n0)
