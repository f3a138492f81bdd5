"""One-bit feedback CSIT estimation simulator.

Jointly sparse angular channels, binary pilot training, sign-quantized
feedback, J-BIHT recovery with per-user and genie baselines, and
beamforming SNR-loss evaluation.
"""

from ._core import (
    ALGORITHMS,
    ConfigError,
    DegenerateChannelError,
    DegenerateResultError,
    DimensionError,
    EncodingError,
    ScenarioConfig,
    SingularSystemError,
    ZeroMatrixError,
    __version__,
    biht,
    design_pilots,
    dft_unitary,
    genie_ls,
    jbiht,
    jbiht_known_support,
    optimal_precoder,
    pack_bits,
    quantize,
    run_experiment,
    run_trial,
    snr_loss_db,
    to_antenna_domain,
    unpack_bits,
)

__all__ = [
    "ALGORITHMS",
    "ConfigError",
    "DegenerateChannelError",
    "DegenerateResultError",
    "DimensionError",
    "EncodingError",
    "ScenarioConfig",
    "SingularSystemError",
    "ZeroMatrixError",
    "__version__",
    "biht",
    "design_pilots",
    "dft_unitary",
    "genie_ls",
    "jbiht",
    "jbiht_known_support",
    "optimal_precoder",
    "pack_bits",
    "quantize",
    "run_experiment",
    "run_trial",
    "snr_loss_db",
    "to_antenna_domain",
    "unpack_bits",
]
