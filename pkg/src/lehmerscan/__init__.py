"""High-precision toolkit for Lehmer pairs of Riemann zeta zeros.

Scans critical-line intervals for zeros of Z(t) and zeta'(s), classifies
consecutive zero pairs as Lehmer / strong Lehmer pairs, computes per-pair
lower bounds on the de Bruijn-Newman constant, and reproduces the scaled
coordinate analysis and statistics of the survey this package accompanies.
"""

from .bignum import BigComplex, BigReal
from .config import EvalConfig, ScanConfig
from .kernels import (
    eval_Xi_and_derivs,
    eval_Xi_deformed,
    eval_Xi_integral,
    eval_Z_and_theta,
    eval_h_logderivs,
    eval_phi,
    eval_zeta,
    eval_zeta_derivs,
)
from .lehmer import (
    ZeroPair,
    classify_lehmer,
    classify_pair,
    compute_g,
    dbn_bound,
    G_value,
    strong_criterion,
    theorem2_rhs,
    theorem3_rhs,
)
from .zeroscan import ZetaZero, refine_zero, scan_zeros, verify_count
from .zprime import ZetaPrimeZero, central_zero, count_zeros_rect, find_zprime_zeros

__version__ = "0.1.0"

__all__ = [
    "BigComplex", "BigReal", "EvalConfig", "ScanConfig",
    "eval_zeta", "eval_zeta_derivs", "eval_h_logderivs", "eval_Z_and_theta",
    "eval_Xi_and_derivs", "eval_phi", "eval_Xi_integral", "eval_Xi_deformed",
    "ZetaZero", "scan_zeros", "verify_count", "refine_zero",
    "ZetaPrimeZero", "count_zeros_rect", "find_zprime_zeros", "central_zero",
    "ZeroPair", "compute_g", "classify_lehmer", "classify_pair", "dbn_bound",
    "strong_criterion", "G_value", "theorem2_rhs", "theorem3_rhs",
    "__version__",
]
