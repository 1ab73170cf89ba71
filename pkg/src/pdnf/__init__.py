"""Exact Poincare-Dulac normal forms, Lie point symmetries and convergence certificates."""

from .algebra import (
    I,
    ONE,
    ZERO,
    ExactMatrix,
    GaussianRational,
    format_coefficient,
    kernel_basis,
    parse_coefficient,
    rank,
    rref,
    solve,
)
from .analysis import (
    BudgetExceeded,
    IntegralBasis,
    OmegaReport,
    ShapeFit,
    check_condition_A,
    check_omega,
    common_linear_integrals,
    constant_proportionality,
    fit_nf_shape,
    fit_nf_shape_candidates,
)
from .normalform import (
    EigenData,
    NormalizationResult,
    block_rotation_matrix,
    eigenbasis_for_block_rotation,
    homological_apply,
    is_resonant,
    normalize,
    pushforward,
    replay,
    solve_homological,
)
from .polyvec import ScalarPoly, VectorField, evaluate, homogeneous_part, lie_bracket
from .symmetry import (
    CertificateReport,
    Evidence,
    certify_theorem1,
    certify_theorem2,
    check_symmetry,
    corollary_2d,
    linear_symmetries,
    transport_symmetry,
)
from .systems import block_invariants, build_example_rotation2d, build_example_so3

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "CertificateReport",
    "EigenData",
    "Evidence",
    "ExactMatrix",
    "GaussianRational",
    "I",
    "IntegralBasis",
    "NormalizationResult",
    "ONE",
    "OmegaReport",
    "ScalarPoly",
    "ShapeFit",
    "VectorField",
    "ZERO",
    "block_invariants",
    "block_rotation_matrix",
    "build_example_rotation2d",
    "build_example_so3",
    "certify_theorem1",
    "certify_theorem2",
    "check_condition_A",
    "check_omega",
    "check_symmetry",
    "common_linear_integrals",
    "constant_proportionality",
    "corollary_2d",
    "eigenbasis_for_block_rotation",
    "evaluate",
    "fit_nf_shape",
    "fit_nf_shape_candidates",
    "format_coefficient",
    "homogeneous_part",
    "homological_apply",
    "is_resonant",
    "kernel_basis",
    "lie_bracket",
    "linear_symmetries",
    "normalize",
    "parse_coefficient",
    "pushforward",
    "rank",
    "replay",
    "rref",
    "solve",
    "solve_homological",
    "transport_symmetry",
]
