"""Numerical verification that the genus-two G-function of the A_n Frobenius manifold vanishes."""

from .frobenius_an import (
    CausticError,
    FrobeniusPoint,
    Jet2,
    ParamPoint,
    build_point,
    sample_admissible,
)
from .g2_function import g2_total, g2_total_terms
from .mp_series import DEFAULT_PRECISION, precision
from .verify_suite import default_registry, run_suite

__version__ = "0.1.0"

__all__ = [
    "CausticError", "FrobeniusPoint", "Jet2", "ParamPoint", "build_point", "sample_admissible",
    "g2_total", "g2_total_terms", "DEFAULT_PRECISION", "precision", "default_registry",
    "run_suite",
]
