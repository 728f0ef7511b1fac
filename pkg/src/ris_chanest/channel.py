"""Physical channel generation for the RIS-aided MISO uplink.

One realization consists of a Rayleigh-faded direct link (user to base
station), a Rayleigh-faded user-to-RIS link, and a deterministic
high-rank scattering matrix between the base station and the RIS. The
estimation target is the composite vector stacking the direct channel and
the columns of the cascade channel.
"""

import math
from dataclasses import dataclass

import numpy as np

from .linalg import sample_cgaussian

__all__ = [
    "Geometry",
    "PathLosses",
    "ChannelRealization",
    "PriorCovariance",
    "sample_direct_channel",
    "sample_irs_channel",
    "sample_angles",
    "build_los_matrix",
    "cascade_channel",
    "composite_vector",
    "prior_covariance",
    "sample_realization",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Geometry:
    """Array/surface geometry for the deterministic BS-RIS matrix.

    Element spacings are expressed in wavelengths, which removes the
    carrier wavelength as a separate parameter. Departure angles are
    indexed per RIS element and arrival angles per BS antenna, matching
    the scattering model this simulator implements.
    """

    m: int
    n: int
    d_bs_over_lambda: float
    d_irs_over_lambda: float
    elevation_dep: np.ndarray  # (n,) radians
    azimuth_dep: np.ndarray  # (n,) radians
    elevation_arr: np.ndarray  # (m,) radians
    azimuth_arr: np.ndarray  # (m,) radians

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("antenna and element counts must be positive")
        if self.d_bs_over_lambda <= 0 or self.d_irs_over_lambda <= 0:
            raise ValueError("element spacings must be positive")
        for name, arr, size in (
            ("elevation_dep", self.elevation_dep, self.n),
            ("azimuth_dep", self.azimuth_dep, self.n),
            ("elevation_arr", self.elevation_arr, self.m),
            ("azimuth_arr", self.azimuth_arr, self.m),
        ):
            arr = np.asarray(arr, dtype=float)
            if arr.shape != (size,):
                raise ValueError(f"{name} must have shape ({size},)")
            object.__setattr__(self, name, arr)
        if np.any(self.elevation_dep < 0) or np.any(self.elevation_dep > math.pi):
            raise ValueError("departure elevations must lie in [0, pi]")
        if np.any(self.elevation_arr < 0) or np.any(self.elevation_arr > math.pi):
            raise ValueError("arrival elevations must lie in [0, pi]")
        for name, arr in (("azimuth_dep", self.azimuth_dep), ("azimuth_arr", self.azimuth_arr)):
            if np.any(arr < 0) or np.any(arr >= TWO_PI):
                raise ValueError(f"{name} must lie in [0, 2*pi)")


@dataclass(frozen=True)
class PathLosses:
    """Path-loss triple (direct, user-RIS, BS-RIS)."""

    beta_bs: float
    beta_irs: float
    beta_bs_irs: float

    def __post_init__(self):
        if self.beta_bs < 0 or self.beta_irs < 0 or self.beta_bs_irs < 0:
            raise ValueError("path losses must be nonnegative")

    @classmethod
    def normalized(cls, n, beta_bs=0.5, beta_bs_irs=1.0):
        """Split a unit power budget between the direct and cascade paths.

        Enforces beta_bs + n * beta_irs * beta_bs_irs = 1 so that SNR is
        not affected by the fading statistics. The default gives the
        direct path and the aggregate cascade path equal power.
        """
        if not 0 <= beta_bs <= 1:
            raise ValueError("beta_bs must lie in [0, 1] for a unit power budget")
        if beta_bs_irs <= 0:
            raise ValueError("beta_bs_irs must be positive")
        beta_irs = (1.0 - beta_bs) / (n * beta_bs_irs)
        return cls(beta_bs, beta_irs, beta_bs_irs)

    def is_normalized(self, n, tol=1e-12):
        return abs(self.beta_bs + n * self.beta_irs * self.beta_bs_irs - 1.0) <= tol

    @property
    def beta_cascade(self):
        """Per-element cascade path loss (product of the two hops)."""
        return self.beta_irs * self.beta_bs_irs


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of all physical channels plus the derived forms.

    ``composite`` is the estimation target: the direct channel followed by
    the N cascade columns, length m*(n+1).
    """

    h_direct: np.ndarray  # (m,)
    h_ris: np.ndarray  # (n,)
    los_bs_ris: np.ndarray  # (m, n)
    cascade: np.ndarray  # (m, n)
    composite: np.ndarray  # (m*(n+1),)


@dataclass(frozen=True)
class PriorCovariance:
    """Structured covariance of the composite channel.

    Block-diagonal: a scaled identity for the direct block and one
    rank-one block per cascade column, beta_irs * b_n b_n^H with b_n the
    n-th column of the deterministic BS-RIS matrix. The full
    m(n+1) x m(n+1) matrix is never materialized; estimators consume the
    factors directly.
    """

    beta_bs: float
    beta_irs: float
    los_columns: np.ndarray  # (m, n)

    @property
    def m(self):
        return self.los_columns.shape[0]

    @property
    def n(self):
        return self.los_columns.shape[1]

    def block_traces(self):
        """Trace of each cascade block, beta_irs * ||b_n||^2."""
        return self.beta_irs * np.sum(np.abs(self.los_columns) ** 2, axis=0)

    def total_trace(self):
        return self.m * self.beta_bs + float(np.sum(self.block_traces()))


def sample_direct_channel(beta_bs, m, rng):
    """Rayleigh direct link: sqrt(beta_bs) * CN(0, I_m)."""
    if beta_bs < 0:
        raise ValueError(f"beta_bs must be nonnegative, got {beta_bs}")
    return math.sqrt(beta_bs) * sample_cgaussian(m, 1.0, rng)


def sample_irs_channel(beta_irs, n, rng):
    """Rayleigh user-to-RIS link: sqrt(beta_irs) * CN(0, I_n)."""
    if beta_irs < 0:
        raise ValueError(f"beta_irs must be nonnegative, got {beta_irs}")
    return math.sqrt(beta_irs) * sample_cgaussian(n, 1.0, rng)


def sample_angles(m, n, rng, d_bs_over_lambda=0.5, d_irs_over_lambda=0.5):
    """Draw the LoS geometry: elevations uniform on (0, pi), azimuths on (0, 2*pi)."""
    return Geometry(
        m=m,
        n=n,
        d_bs_over_lambda=d_bs_over_lambda,
        d_irs_over_lambda=d_irs_over_lambda,
        elevation_dep=rng.uniform(0.0, math.pi, n),
        azimuth_dep=rng.uniform(0.0, TWO_PI, n),
        elevation_arr=rng.uniform(0.0, math.pi, m),
        azimuth_arr=rng.uniform(0.0, TWO_PI, m),
    )


def build_los_matrix(geom, beta_bs_irs):
    """Deterministic high-rank BS-RIS scattering matrix.

    Entry (m, n) is sqrt(beta_bs_irs) * exp(i * 2*pi * [
        m * d_bs_over_lambda * sin(elevation_dep[n]) * sin(azimuth_dep[n])
      + n * d_irs_over_lambda * sin(elevation_arr[m]) * sin(azimuth_arr[m]) ])
    with zero-based m, n. Every entry has modulus sqrt(beta_bs_irs); the
    matrix is held fixed across fading realizations.
    """
    if beta_bs_irs < 0:
        raise ValueError(f"beta_bs_irs must be nonnegative, got {beta_bs_irs}")
    m_idx = np.arange(geom.m, dtype=float)[:, None]
    n_idx = np.arange(geom.n, dtype=float)[None, :]
    dep = np.sin(geom.elevation_dep) * np.sin(geom.azimuth_dep)  # (n,)
    arr = np.sin(geom.elevation_arr) * np.sin(geom.azimuth_arr)  # (m,)
    phase = TWO_PI * (
        m_idx * geom.d_bs_over_lambda * dep[None, :]
        + n_idx * geom.d_irs_over_lambda * arr[:, None]
    )
    return math.sqrt(beta_bs_irs) * np.exp(1j * phase)


def cascade_channel(los_bs_ris, h_ris):
    """Cascade channel: column n is h_ris[n] times column n of the LoS matrix."""
    los_bs_ris = np.asarray(los_bs_ris)
    h_ris = np.asarray(h_ris)
    if los_bs_ris.ndim != 2 or h_ris.ndim != 1 or los_bs_ris.shape[1] != h_ris.shape[0]:
        raise ValueError(
            f"shape mismatch: LoS matrix {los_bs_ris.shape} vs RIS link {h_ris.shape}"
        )
    return los_bs_ris * h_ris[None, :]


def composite_vector(h_direct, cascade):
    """Stack the direct channel and the cascade columns into one vector."""
    h_direct = np.asarray(h_direct)
    cascade = np.asarray(cascade)
    if cascade.size and cascade.shape[0] != h_direct.shape[0]:
        raise ValueError(
            f"shape mismatch: direct {h_direct.shape} vs cascade {cascade.shape}"
        )
    return np.concatenate([h_direct, cascade.ravel(order="F")])


def prior_covariance(losses, los_bs_ris):
    """Structured prior implied by the fading model and a known LoS matrix."""
    return PriorCovariance(
        beta_bs=losses.beta_bs,
        beta_irs=losses.beta_irs,
        los_columns=np.asarray(los_bs_ris),
    )


def sample_realization(losses, los_bs_ris, rng):
    """Draw the two fading links and assemble all derived channel forms."""
    m, n = np.asarray(los_bs_ris).shape
    h_direct = sample_direct_channel(losses.beta_bs, m, rng)
    h_ris = sample_irs_channel(losses.beta_irs, n, rng)
    casc = cascade_channel(los_bs_ris, h_ris)
    return ChannelRealization(
        h_direct=h_direct,
        h_ris=h_ris,
        los_bs_ris=np.asarray(los_bs_ris),
        cascade=casc,
        composite=composite_vector(h_direct, casc),
    )
