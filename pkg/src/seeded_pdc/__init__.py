"""Nonclassicality of thermally seeded parametric downconversion.

Analytic moments and the intensity-correlation, negativity and entanglement
parameters (``core``), checked against a Gaussian covariance oracle
(``gaussian``) and an exact Fock-space oracle with a Monte Carlo sampler
(``fockspace``); lossy detection (``detection``) and many-pair fields
(``multimode``).
"""
from .core import (
    GammaReport,
    PdcParams,
    Region,
    Thresholds,
    TwoModeMoments,
    classify_region,
    gamma_c,
    gamma_e,
    gamma_n,
    gamma_report,
    output_moments,
    thresholds,
)
from .detection import CountRecord, LossModel, estimate_gammas, gamma_with_loss, lossy_moments, thin_counts
from .errors import (
    InsufficientData,
    NotApplicable,
    NumericalFailure,
    TruncationError,
    UndefinedPointError,
)
from .fockspace import block_unitary, joint_pmf, sample_counts
from .gaussian import build_covariance, ppt_check
from .multimode import (
    MultimodeParams,
    multimode_moments,
    multimode_negativity,
    multimode_snl_violation,
    multimode_witness,
)

__version__ = "0.1.0"
