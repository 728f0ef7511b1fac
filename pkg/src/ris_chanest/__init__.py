"""Channel estimation simulator for a RIS-aided MISO uplink.

Implements pilot-based estimation of the composite (direct plus cascade)
channel: least-squares estimators under on-off and DFT activation
patterns, the MMSE estimator built on the DFT-pattern LS output, their
closed-form NMSE predictions, and a reproducible parallel Monte Carlo
sweep that cross-validates the two.
"""

__version__ = "0.1.0"

from .channel import (
    ChannelRealization,
    Geometry,
    PathLosses,
    PriorCovariance,
    build_los_matrix,
    cascade_channel,
    composite_vector,
    prior_covariance,
    sample_angles,
    sample_direct_channel,
    sample_irs_channel,
    sample_realization,
)
from .estimators import (
    ESTIMATOR_NAMES,
    Estimate,
    NoiseModel,
    mmse,
    mmse_direct,
    mvu_dft,
    mvu_onoff,
    predict_nmse,
)
from .linalg import RngStream, fixed_order_sum, hermitian, kron, sample_cgaussian
from .patterns import (
    ActivationPattern,
    PatternReport,
    dft_pattern,
    onoff_pattern,
    validate_pattern,
)
from .sim import (
    EstimatorNMSE,
    NMSECurve,
    SweepSetup,
    SystemConfig,
    TrialResult,
    closed_form_curves,
    default_estimators,
    make_config,
    monte_carlo_sweep,
    prepare_sweep,
    run_trial,
    snr_db_to_n0,
    synthesize_pilots,
)

__all__ = [
    "__version__",
    "RngStream",
    "kron",
    "hermitian",
    "sample_cgaussian",
    "fixed_order_sum",
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
    "ActivationPattern",
    "PatternReport",
    "onoff_pattern",
    "dft_pattern",
    "validate_pattern",
    "Estimate",
    "NoiseModel",
    "ESTIMATOR_NAMES",
    "mvu_onoff",
    "mvu_dft",
    "mmse",
    "mmse_direct",
    "predict_nmse",
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
