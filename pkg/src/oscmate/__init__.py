"""Osculating mates of space curves.

A toolkit for the Frenet apparatus of sampled and analytic curves, the
osculating mate construction and its curvature formulas, and numerical
verdicts for helices, slant helices, spherical, rectifying, Bertrand,
Mannheim and Salkowski curves.
"""

from .catalog import catalog_curve, sampled_catalog_curve
from .classify import Tolerances, classify_mate, classify_report, equivalence_report
from .curves import (
    Curve, SampledCurve, apparatus_from_points, arclength_reparametrize, frenet_apparatus,
    sample_curve, synthesize_from_curvatures,
)
from .exprparse import compile_expr, eval_expr, parse_expr
from .mates import inverse_curvatures, osculating_mate, ot_osculating_mate, position_decomposition
from .numerics import Grid

__version__ = "0.1.0"

__all__ = [
    "Curve", "Grid", "SampledCurve", "Tolerances", "apparatus_from_points",
    "arclength_reparametrize", "catalog_curve", "classify_mate", "classify_report",
    "compile_expr", "equivalence_report", "eval_expr", "frenet_apparatus", "inverse_curvatures",
    "osculating_mate", "ot_osculating_mate", "parse_expr", "position_decomposition",
    "sample_curve", "sampled_catalog_curve", "synthesize_from_curvatures",
]
