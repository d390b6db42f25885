"""Parallel block-coordinate solver for composite problems F(x) + G(x)."""

from ._fpa import (
    InvalidArgument,
    NumericFailure,
    ParseError,
    Problem,
    SolveResult,
    ValidationError,
    fista,
    gauss_seidel,
    generate_lasso,
    kkt_residual,
    load_instance,
    soft_threshold,
    solve,
)

__all__ = [
    "InvalidArgument",
    "NumericFailure",
    "ParseError",
    "Problem",
    "SolveResult",
    "ValidationError",
    "fista",
    "gauss_seidel",
    "generate_lasso",
    "kkt_residual",
    "load_instance",
    "soft_threshold",
    "solve",
]

__version__ = "0.1.0"
