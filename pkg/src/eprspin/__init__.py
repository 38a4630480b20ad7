"""Certified arithmetic for the spin-j EPR-Bohm experiment.

Joint outcome distributions, singlet Wigner functions, and detector-error
(coarse-graining) protocols, all evaluated in ball arithmetic so that
signs and identities come with machine-checked error bounds.
"""

from .numerics import (
    CertifiedReal,
    DomainError,
    PrecisionContext,
    binomial,
    gauss_legendre,
    legendre,
    legendre_ladder,
)
from .spinbasis import (
    ChebyshevBasis,
    CoefficientLadder,
    FMatrix,
    SpinQuantum,
    chebyshev_basis,
    f_matrix,
    f_matrix_from_cos,
    f_matrix_spectral,
    f_matrix_spectral_from_cos,
    ladder,
    spin,
)
from .distributions import (
    AxisPair,
    JointDistribution,
    QuadratureUnderResolved,
    correlation,
    joint_direct,
    joint_factorized,
    joint_quadrature,
    one_axis,
)
from .wigner import (
    WignerProfile,
    projector_symbol,
    reconstruct_joint,
    wigner_closed,
    wigner_series,
    wigner_smoothed_special,
)
from .protocols import (
    ErrorMatrix,
    PositivityCertificate,
    Spectrum,
    SufficiencyReport,
    build_R,
    build_R_binned,
    build_protocol,
    certify_positivity,
    check_agnostic,
    gaussian_approx,
    h_function,
    mix_with_trivial,
    repair_binned,
    smoothed_one_axis,
    special_smoothed_closed,
    spectrum_oversufficient,
    spectrum_special,
    spectrum_trivial,
    sufficiency_scan,
)
from .verification import InvariantResult, run_suite

__version__ = "0.1.0"

__all__ = [
    "CertifiedReal",
    "DomainError",
    "PrecisionContext",
    "binomial",
    "gauss_legendre",
    "legendre",
    "legendre_ladder",
    "ChebyshevBasis",
    "CoefficientLadder",
    "FMatrix",
    "SpinQuantum",
    "chebyshev_basis",
    "f_matrix",
    "f_matrix_from_cos",
    "f_matrix_spectral",
    "f_matrix_spectral_from_cos",
    "ladder",
    "spin",
    "AxisPair",
    "JointDistribution",
    "QuadratureUnderResolved",
    "correlation",
    "joint_direct",
    "joint_factorized",
    "joint_quadrature",
    "one_axis",
    "WignerProfile",
    "projector_symbol",
    "reconstruct_joint",
    "wigner_closed",
    "wigner_series",
    "wigner_smoothed_special",
    "ErrorMatrix",
    "PositivityCertificate",
    "Spectrum",
    "SufficiencyReport",
    "build_R",
    "build_R_binned",
    "build_protocol",
    "certify_positivity",
    "check_agnostic",
    "gaussian_approx",
    "h_function",
    "mix_with_trivial",
    "repair_binned",
    "smoothed_one_axis",
    "special_smoothed_closed",
    "spectrum_oversufficient",
    "spectrum_special",
    "spectrum_trivial",
    "sufficiency_scan",
    "InvariantResult",
    "run_suite",
]
