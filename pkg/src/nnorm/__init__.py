"""Computational toolkit for linear n-normed spaces and b-linear functionals."""

from .core import (
    DeterminantNorm,
    NNorm,
    NNormError,
    Polynomial,
    PolyCoeffProductNorm,
    ProductMaxNorm,
    ProductPair,
    ProductSumNorm,
    ball_contains,
    check_axioms,
    eval_nnorm,
    is_linearly_dependent,
)

__version__ = "0.1.0"

__all__ = [
    "DeterminantNorm",
    "NNorm",
    "NNormError",
    "Polynomial",
    "PolyCoeffProductNorm",
    "ProductMaxNorm",
    "ProductPair",
    "ProductSumNorm",
    "ball_contains",
    "check_axioms",
    "eval_nnorm",
    "is_linearly_dependent",
]
