"""Steiner bundles from point sets and curves, with exact unstable-line oracles."""

from .exactalg import GF, QQ, FieldElem, FieldMismatchError, Mat, cokernel_projection, kernel_basis, parse_field, rank, rref
from .polygeom import (
    HomForm,
    PointConfig,
    ProjPoint,
    eval_matrix,
    h0_ideal,
    h1_ideal,
    is_general_position,
    linear_system,
    max_secant,
    monomials,
)
from .steiner import (
    SteinerPresentation,
    build_curve_twist,
    build_logarithmic,
    build_schwarzenberger,
    hom_space,
    is_isomorphic,
    restrict_to_hyperplane,
    validate_bundle,
)
from .instability import (
    classify_W_ideal,
    projected_cubic,
    scan_W_bundle,
    secant_pencil_check,
    splitting_type,
    torelli_compare,
    unstable_test_bundle,
    unstable_test_ideal,
)

__version__ = "0.1.0"

__all__ = [
    "GF",
    "QQ",
    "FieldElem",
    "FieldMismatchError",
    "Mat",
    "cokernel_projection",
    "kernel_basis",
    "parse_field",
    "rank",
    "rref",
    "HomForm",
    "PointConfig",
    "ProjPoint",
    "eval_matrix",
    "h0_ideal",
    "h1_ideal",
    "is_general_position",
    "linear_system",
    "max_secant",
    "monomials",
    "SteinerPresentation",
    "build_curve_twist",
    "build_logarithmic",
    "build_schwarzenberger",
    "hom_space",
    "is_isomorphic",
    "restrict_to_hyperplane",
    "validate_bundle",
    "classify_W_ideal",
    "projected_cubic",
    "scan_W_bundle",
    "secant_pencil_check",
    "splitting_type",
    "torelli_compare",
    "unstable_test_bundle",
    "unstable_test_ideal",
]
