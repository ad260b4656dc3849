"""Exact integrals of motion for a charged particle in a constant magnetic
field plus a resonant anisotropic quadratic potential.

Polynomials live in Q(w)[x, y, z, p1, p2, p3] with ``w**2`` rational; every
identity is checked by exact arithmetic.
"""
from .exactfield import FieldMismatchError, QwScalar, bareiss_rank, parse_rational, solve_linear
from .kernels import BACKEND
from .model import (
    IntegralSet,
    InvariantViolation,
    ParameterError,
    SystemParams,
    build_integrals,
    build_system,
    derive_params,
)
from .phasepoly import PhasePoly, gauge_transform, partial_derivative, poisson_bracket, substitute

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "FieldMismatchError",
    "IntegralSet",
    "InvariantViolation",
    "ParameterError",
    "PhasePoly",
    "QwScalar",
    "SystemParams",
    "bareiss_rank",
    "build_integrals",
    "build_system",
    "derive_params",
    "gauge_transform",
    "parse_rational",
    "partial_derivative",
    "poisson_bracket",
    "solve_linear",
    "substitute",
]
