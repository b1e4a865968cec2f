"""Toric degeneration data of principally polarized abelian varieties.

From an even positive-definite integer quadratic form the package builds the
canonical periodic subdivision, evaluates the associated theta functions,
computes discrete Monge-Ampere measures, and numerically certifies the
balanced-embedding and convergence theorems at desk scale.
"""

__version__ = "0.1.0"

from .lattice import AffineLinear, QForm, alpha, cocycle_defect, phi_bar, reduce_mod
from .subdivision import (
    Cell,
    PeriodicSubdivision,
    build_subdivision,
    eval_phi,
    quotient_complex,
    slope_integrality,
)

__all__ = [
    "AffineLinear",
    "QForm",
    "alpha",
    "cocycle_defect",
    "phi_bar",
    "reduce_mod",
    "Cell",
    "PeriodicSubdivision",
    "build_subdivision",
    "eval_phi",
    "quotient_complex",
    "slope_integrality",
    "__version__",
]
