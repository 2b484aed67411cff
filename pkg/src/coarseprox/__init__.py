"""Decision procedures for coarse proximity relations on concrete set classes.

Eventually periodic subsets of the integers (metric structure) and finitely
described subsets of the non-negative rationals (half-line structure) are
decided exactly; arbitrary integer predicates get a windowed semi-decision.
"""

from __future__ import annotations

from .backends import GeneratorSet, HalfLine, Metric, QHalfLine, UnknownAtWindow, Windowed, ZMetric, get_backend
from .expr import elaborate, parse_expr, print_expr
from .normality import interpolate, interpolate_star, nonnormality_certificate, split_asymptotic, validate_certificate
from .relations import asym_bounded, b_rel, lambda_rel, nbhd, prec
from .setalg_q import QSet
from .setalg_z import EPSet

__version__ = "0.1.0"

__all__ = [
    "EPSet",
    "QSet",
    "GeneratorSet",
    "Metric",
    "HalfLine",
    "ZMetric",
    "QHalfLine",
    "Windowed",
    "UnknownAtWindow",
    "get_backend",
    "parse_expr",
    "print_expr",
    "elaborate",
    "b_rel",
    "prec",
    "nbhd",
    "lambda_rel",
    "asym_bounded",
    "interpolate",
    "interpolate_star",
    "split_asymptotic",
    "nonnormality_certificate",
    "validate_certificate",
]
