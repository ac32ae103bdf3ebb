"""Nearest-integer continued fractions over the Eisenstein and Gaussian
integers, with exact arithmetic kernels and brute-force verification of the
classical approximation inequalities."""

from .approx import (
    ApproxVerdict,
    BadApproxVerdict,
    classify_bad_approx,
    delta_bound,
    delta_bound_from_norm,
    growth_bound_check,
    scan_one,
    scan_samples,
    verify_all_indices,
    verify_best_approx,
)
from .balls import ComplexAP, RealBall
from .engine import (
    Expansion,
    QPair,
    RatioReport,
    ResidualCheck,
    convergent,
    expand,
    fold_up,
    invariant_report,
    normalized_residual_sq,
    q_pair,
    ratio_report,
    residual,
)
from .errors import (
    DomainError,
    EnumerationTooLarge,
    IndexOutOfRange,
    ParseError,
    PrecisionInsufficient,
    ZeroDenominator,
)
from .rationals import RingRational
from .rings import (
    EisensteinInt,
    GaussianInt,
    Ring,
    enumerate_up_to_norm,
    nearest_lattice,
    ring_gcd,
)

__version__ = "0.1.0"

__all__ = [
    "ApproxVerdict",
    "BadApproxVerdict",
    "ComplexAP",
    "DomainError",
    "EisensteinInt",
    "EnumerationTooLarge",
    "Expansion",
    "GaussianInt",
    "IndexOutOfRange",
    "ParseError",
    "PrecisionInsufficient",
    "QPair",
    "RatioReport",
    "RealBall",
    "ResidualCheck",
    "Ring",
    "RingRational",
    "ZeroDenominator",
    "classify_bad_approx",
    "convergent",
    "delta_bound",
    "delta_bound_from_norm",
    "enumerate_up_to_norm",
    "expand",
    "fold_up",
    "growth_bound_check",
    "invariant_report",
    "nearest_lattice",
    "normalized_residual_sq",
    "q_pair",
    "ratio_report",
    "residual",
    "ring_gcd",
    "scan_one",
    "scan_samples",
    "verify_all_indices",
    "verify_best_approx",
]
