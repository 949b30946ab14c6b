"""Proper r-harmonic isoparametric hypersurfaces in space forms.

Exact algebraic criteria, the degree-4 critical orders r*(b) and r**(b),
and a finite-difference geometry oracle for spheres and Clifford tori.
"""

__version__ = "0.1.0"

from .criterion import HarmonicityQuery, classify, residual, scan_residual
from .family import IsoparametricFamily, invariants, minimal_parameter
from .quartic import build as build_quartic
from .thresholds import brute_force_thresholds, minimize, upper_bounds

__all__ = [
    "HarmonicityQuery",
    "IsoparametricFamily",
    "brute_force_thresholds",
    "build_quartic",
    "classify",
    "invariants",
    "minimal_parameter",
    "minimize",
    "residual",
    "scan_residual",
    "upper_bounds",
]
