"""Grünbaum-type inequalities for sections, projections, intrinsic and dual volumes."""

__version__ = "0.1.0"

from .core import Seed, SharpConstantKind, Subspace, sharp_constant
from .polytope import HalfSpace, Polytope, hull
from .bodies import ProductConeBody, make_equality_body, make_sharpness_family
from .measures import Estimate, dual_volume, dual_volume_halfspace, intrinsic_volume
from .inequalities import (
    CheckConfig,
    InequalityReport,
    SweepRow,
    check_centroid_section,
    check_halfspace,
    check_prop,
    sharpness_sweep,
    worst_direction,
)

__all__ = [
    "CheckConfig", "Estimate", "HalfSpace", "InequalityReport", "Polytope", "ProductConeBody",
    "Seed", "SharpConstantKind", "Subspace", "SweepRow", "check_centroid_section", "check_halfspace",
    "check_prop", "dual_volume", "dual_volume_halfspace", "hull", "intrinsic_volume",
    "make_equality_body", "make_sharpness_family", "sharp_constant", "sharpness_sweep",
    "worst_direction",
]
