"""Pilot observation synthesis and the seeded Monte Carlo NMSE sweep.

Trials are independent tasks: each draws its fading and noise from its own
counter-based substreams of the master seed, so results are reproducible
for any worker count and adding or removing estimators never perturbs the
channel draws. Per-trial squared errors land in a pre-sized array indexed
by trial and are reduced in fixed order, which makes the sweep output
bit-identical regardless of parallelism.
"""

import math
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field

import numpy as np

from .channel import (
    PathLosses,
    build_los_matrix,
    prior_covariance,
    sample_angles,
    sample_realization,
)
from .estimators import ESTIMATOR_NAMES, NoiseModel, mmse, mvu_dft, mvu_onoff, predict_nmse
from .linalg import RngStream, fixed_order_sum, sample_cgaussian
from .patterns import dft_pattern, onoff_pattern

__all__ = [
    "SystemConfig",
    "TrialResult",
    "EstimatorNMSE",
    "NMSECurve",
    "SweepSetup",
    "make_config",
    "default_estimators",
    "snr_db_to_n0",
    "prepare_sweep",
    "synthesize_pilots",
    "run_trial",
    "monte_carlo_sweep",
    "closed_form_curves",
]

PATTERN_KINDS = ("dft", "onoff")

# Activation pattern each estimator is defined on.
ESTIMATOR_PATTERN = {"mvu-onoff": "onoff", "mvu-dft": "dft", "mmse": "dft"}

# Substream lanes under the master seed. The experiment-level LoS angles
# use lane 0; each trial owns a fixed group of lanes so that fading, noise
# and (optional) per-trial angles never share a stream.
ANGLE_STREAM = 0
_TRIAL_LANES = 4


def _fading_stream_id(trial_id):
    return 1 + _TRIAL_LANES * trial_id


def _noise_stream_id(trial_id):
    return 2 + _TRIAL_LANES * trial_id


def _trial_angle_stream_id(trial_id):
    return 3 + _TRIAL_LANES * trial_id


def snr_db_to_n0(snr_db):
    """SNR convention: unit pilot power, so SNR = 1/n0."""
    return 10.0 ** (-snr_db / 10.0)


@dataclass(frozen=True)
class SystemConfig:
    """All experiment parameters; immutable and fully seed-determined."""

    m: int
    n: int
    tau_p: int
    losses: PathLosses
    snr_grid_db: tuple
    trials: int
    master_seed: int
    pattern: str
    estimators: tuple
    pilots: tuple
    d_bs_over_lambda: float = 0.5
    d_irs_over_lambda: float = 0.5
    resample_los: bool = False

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be positive, got {self.m}")
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if self.tau_p < self.n + 1:
            raise ValueError(
                f"tau_p must be at least n+1={self.n + 1}, got {self.tau_p}"
            )
        if self.trials < 1:
            raise ValueError(f"trials must be positive, got {self.trials}")
        if self.master_seed < 0:
            raise ValueError(f"seed must be nonnegative, got {self.master_seed}")
        if self.pattern not in PATTERN_KINDS:
            raise ValueError(f"pattern must be one of {PATTERN_KINDS}, got {self.pattern!r}")
        if not self.snr_grid_db:
            raise ValueError("snr_grid_db must not be empty")
        object.__setattr__(self, "snr_grid_db", tuple(float(s) for s in self.snr_grid_db))
        if not self.estimators:
            raise ValueError("estimator set must not be empty")
        for name in self.estimators:
            if name not in ESTIMATOR_NAMES:
                raise ValueError(f"unknown estimator {name!r}, expected one of {ESTIMATOR_NAMES}")
        if len(set(self.estimators)) != len(self.estimators):
            raise ValueError("estimator set contains duplicates")
        if "mvu-onoff" in self.estimators and self.tau_p != self.n + 1:
            raise ValueError(
                f"the onoff pattern is only defined for tau_p=n+1={self.n + 1}, got tau_p={self.tau_p}"
            )
        if not 0 < self.losses.beta_bs < 1:
            raise ValueError(
                f"beta_bs must lie strictly inside (0, 1), got {self.losses.beta_bs}"
            )
        if not self.losses.is_normalized(self.n, tol=1e-9):
            raise ValueError(
                "path losses must satisfy beta_bs + n*beta_irs*beta_bs_irs = 1"
            )
        pilots = tuple(complex(x) for x in self.pilots)
        if len(pilots) != self.tau_p:
            raise ValueError(
                f"pilot sequence must have tau_p={self.tau_p} entries, got {len(pilots)}"
            )
        for t, x in enumerate(pilots):
            if abs(abs(x) - 1.0) > 1e-9:
                raise ValueError(
                    f"non-unit pilot amplitude |x_{t + 1}|={abs(x):.6g}; pilots must have |x|=1"
                )
        object.__setattr__(self, "pilots", pilots)

    @property
    def noise_model_for(self):
        return lambda n0: NoiseModel(n0=n0, tau_p=self.tau_p)


def default_estimators(pattern):
    """Estimator set implied by a pattern kind when none is requested."""
    return ("mvu-dft", "mmse") if pattern == "dft" else ("mvu-onoff",)


def make_config(
    m=10,
    n=50,
    tau_p=None,
    *,
    beta_bs=0.5,
    beta_bs_irs=1.0,
    snr_grid_db=None,
    trials=10_000,
    master_seed=0,
    pattern="dft",
    estimators=None,
    pilots=None,
    d_bs_over_lambda=0.5,
    d_irs_over_lambda=0.5,
    resample_los=False,
):
    """Build a :class:`SystemConfig` with the numerical-study defaults.

    Defaults: M=10, N=50, tau_p=N+1 pilots, 10^4 trials, seed 0, DFT
    pattern, SNR grid -20..20 dB in 5 dB steps, all-ones pilot sequence,
    and a symmetric power split between the direct and aggregate cascade
    paths (beta_bs=0.5, beta_bs_irs=1).
    """
    if tau_p is None:
        tau_p = n + 1
    if snr_grid_db is None:
        snr_grid_db = tuple(float(s) for s in range(-20, 25, 5))
    if estimators is None:
        estimators = default_estimators(pattern)
    if pilots is None:
        pilots = (1.0 + 0.0j,) * tau_p
    losses = PathLosses.normalized(n, beta_bs=beta_bs, beta_bs_irs=beta_bs_irs)
    return SystemConfig(
        m=m,
        n=n,
        tau_p=tau_p,
        losses=losses,
        snr_grid_db=tuple(snr_grid_db),
        trials=trials,
        master_seed=master_seed,
        pattern=pattern,
        estimators=tuple(estimators),
        pilots=tuple(pilots),
        d_bs_over_lambda=d_bs_over_lambda,
        d_irs_over_lambda=d_irs_over_lambda,
        resample_los=resample_los,
    )


@dataclass(frozen=True)
class SweepSetup:
    """Experiment-level state shared by all trials of a sweep.

    The LoS geometry is drawn once per master seed and held fixed across
    trials (it is deterministic and known to the MMSE prior); patterns and
    the pilot sequence are precomputed.
    """

    geometry: object
    los_bs_ris: np.ndarray
    prior: object
    patterns: dict
    pilots: np.ndarray


@dataclass(frozen=True)
class TrialResult:
    """Per-estimator squared errors of one trial, one value per channel block."""

    trial_id: int
    sq_errors: dict  # name -> ndarray (n+1,)


@dataclass(frozen=True)
class EstimatorNMSE:
    """Empirical and closed-form NMSE for one estimator at one SNR point."""

    direct_emp: float | None
    cascade_emp: float | None
    direct_cf: float
    cascade_cf: float


@dataclass(frozen=True)
class NMSECurve:
    snr_db: float
    n0: float
    per_estimator: dict  # name -> EstimatorNMSE


def _needed_patterns(estimators):
    kinds = []
    for name in estimators:
        kind = ESTIMATOR_PATTERN[name]
        if kind not in kinds:
            kinds.append(kind)
    return kinds


def prepare_sweep(cfg):
    """Sample the LoS geometry from the master seed and precompute shared state."""
    rng = RngStream(cfg.master_seed, ANGLE_STREAM)
    geom = sample_angles(
        cfg.m, cfg.n, rng, cfg.d_bs_over_lambda, cfg.d_irs_over_lambda
    )
    los = build_los_matrix(geom, cfg.losses.beta_bs_irs)
    patterns = {}
    for kind in _needed_patterns(cfg.estimators):
        if kind == "onoff":
            patterns["onoff"] = onoff_pattern(cfg.n)
        else:
            patterns["dft"] = dft_pattern(cfg.tau_p, cfg.n)
    return SweepSetup(
        geometry=geom,
        los_bs_ris=los,
        prior=prior_covariance(cfg.losses, los),
        patterns=patterns,
        pilots=np.asarray(cfg.pilots, dtype=complex),
    )


def synthesize_pilots(ch, pattern, pilots, n0, rng):
    """Simulate the despread pilot observations for one coherence interval.

    For each pilot symbol t the base station receives
    (direct + cascade @ reflection_row_t) * x_t + noise, multiplies by the
    pilot conjugate, and stacks the blocks. The result equals the
    Kronecker-structured linear model applied to the composite channel
    plus white noise of variance n0 per entry.
    """
    pilots = np.asarray(pilots, dtype=complex)
    m = ch.h_direct.shape[0]
    if ch.cascade.shape != (m, pattern.n):
        raise ValueError(
            f"cascade shape {ch.cascade.shape} does not match pattern with n={pattern.n}"
        )
    if pilots.shape != (pattern.tau_p,):
        raise ValueError(
            f"expected {pattern.tau_p} pilot symbols, got {pilots.shape}"
        )
    h_comp = np.concatenate([ch.h_direct[:, None], ch.cascade], axis=1)  # (m, n+1)
    signal = h_comp @ pattern.matrix.T  # (m, tau_p), column t
    noise = sample_cgaussian(m * pattern.tau_p, n0, rng).reshape(
        m, pattern.tau_p, order="F"
    )
    received = signal * pilots[None, :] + noise
    despread = received * pilots.conj()[None, :]
    return despread.ravel(order="F")


def run_trial(cfg, n0, trial_id, setup):
    """Run every configured estimator on one channel/noise draw.

    Fading and noise come from disjoint per-trial substreams; estimators
    that share a pattern also share the observation, and distinct patterns
    reuse the same noise draw (common random numbers), so pattern
    comparisons are paired.
    """
    if not 0 <= trial_id < cfg.trials:
        raise ValueError(f"trial_id {trial_id} outside 0..{cfg.trials - 1}")
    los = setup.los_bs_ris
    prior = setup.prior
    if cfg.resample_los:
        geom = sample_angles(
            cfg.m,
            cfg.n,
            RngStream(cfg.master_seed, _trial_angle_stream_id(trial_id)),
            cfg.d_bs_over_lambda,
            cfg.d_irs_over_lambda,
        )
        los = build_los_matrix(geom, cfg.losses.beta_bs_irs)
        prior = prior_covariance(cfg.losses, los)

    fading = RngStream(cfg.master_seed, _fading_stream_id(trial_id))
    ch = sample_realization(cfg.losses, los, fading)

    observations = {}
    for kind in _needed_patterns(cfg.estimators):
        noise_rng = RngStream(cfg.master_seed, _noise_stream_id(trial_id))
        observations[kind] = synthesize_pilots(
            ch, setup.patterns[kind], setup.pilots, n0, noise_rng
        )

    noise_model = NoiseModel(n0=n0, tau_p=cfg.tau_p)
    dft_estimate = None
    if "mvu-dft" in cfg.estimators or "mmse" in cfg.estimators:
        dft_estimate = mvu_dft(observations["dft"], setup.patterns["dft"])

    sq_errors = {}
    for name in cfg.estimators:
        if name == "mvu-onoff":
            est = mvu_onoff(observations["onoff"], setup.patterns["onoff"])
        elif name == "mvu-dft":
            est = dft_estimate
        else:
            est = mmse(dft_estimate.h_hat, prior, noise_model)
        err = (est.h_hat - ch.composite).reshape(cfg.n + 1, cfg.m)
        per_block = np.sum(np.abs(err) ** 2, axis=1)
        est.per_block_sq_error = per_block
        sq_errors[name] = per_block
    return TrialResult(trial_id=trial_id, sq_errors=sq_errors)


def _chunk_errors(cfg, setup, n0, start, stop):
    """Worker task: per-block squared errors for trials start..stop-1."""
    out = np.empty((stop - start, len(cfg.estimators), cfg.n + 1))
    for i, trial_id in enumerate(range(start, stop)):
        result = run_trial(cfg, n0, trial_id, setup)
        for e, name in enumerate(cfg.estimators):
            out[i, e] = result.sq_errors[name]
    return start, out


def _reduce_curve(cfg, snr_db, n0, errors):
    """Fixed-order reduction of the pre-sized error array into one curve point."""
    k = cfg.trials
    noise_model = NoiseModel(n0=n0, tau_p=cfg.tau_p)
    beta_cas = cfg.losses.beta_cascade
    per_estimator = {}
    for e, name in enumerate(cfg.estimators):
        block_sums = [fixed_order_sum(errors[:, e, b]) for b in range(cfg.n + 1)]
        direct_emp = block_sums[0] / (k * cfg.m * cfg.losses.beta_bs)
        cascade_emp = fixed_order_sum(block_sums[1:]) / (k * cfg.n * cfg.m * beta_cas)
        per_estimator[name] = EstimatorNMSE(
            direct_emp=direct_emp,
            cascade_emp=cascade_emp,
            direct_cf=predict_nmse(name, "direct", cfg.losses, noise_model, m=cfg.m),
            cascade_cf=predict_nmse(name, "cascade", cfg.losses, noise_model, m=cfg.m),
        )
    return NMSECurve(snr_db=snr_db, n0=n0, per_estimator=per_estimator)


def monte_carlo_sweep(cfg, threads=1):
    """Empirical and closed-form NMSE at every SNR grid point.

    Trials fan out over ``threads`` worker processes (serial when 1) and
    land in a pre-sized array indexed by trial id; the reduction is a
    fixed-order sum, so the output is bit-identical for any thread count.
    """
    setup = prepare_sweep(cfg)
    n_est = len(cfg.estimators)
    k = cfg.trials
    curves = []
    executor = ProcessPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for snr_db in cfg.snr_grid_db:
            n0 = snr_db_to_n0(snr_db)
            errors = np.empty((k, n_est, cfg.n + 1))
            if executor is None:
                _, errors[:] = _chunk_errors(cfg, setup, n0, 0, k)
            else:
                chunk = max(1, math.ceil(k / (threads * 8)))
                futures = [
                    executor.submit(_chunk_errors, cfg, setup, n0, s, min(s + chunk, k))
                    for s in range(0, k, chunk)
                ]
                for fut in as_completed(futures):
                    start, block = fut.result()
                    errors[start : start + block.shape[0]] = block
            curves.append(_reduce_curve(cfg, snr_db, n0, errors))
    finally:
        if executor is not None:
            executor.shutdown()
    return curves


def closed_form_curves(cfg):
    """Prediction-only curves (no Monte Carlo)."""
    curves = []
    for snr_db in cfg.snr_grid_db:
        n0 = snr_db_to_n0(snr_db)
        noise_model = NoiseModel(n0=n0, tau_p=cfg.tau_p)
        per_estimator = {
            name: EstimatorNMSE(
                direct_emp=None,
                cascade_emp=None,
                direct_cf=predict_nmse(name, "direct", cfg.losses, noise_model, m=cfg.m),
                cascade_cf=predict_nmse(name, "cascade", cfg.losses, noise_model, m=cfg.m),
            )
            for name in cfg.estimators
        }
        curves.append(NMSECurve(snr_db=snr_db, n0=n0, per_estimator=per_estimator))
    return curves
