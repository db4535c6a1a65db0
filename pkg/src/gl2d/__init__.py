"""Exact mod-p verification engine for compact inductions of GL2 over a
p-adic division algebra: residue-field arithmetic, truncated Teichmueller
digit calculus, tree-coset canonical forms, the spherical Hecke operator,
and identity-verification suites with a CLI driver."""

from .errors import (
    CatalogBroken,
    ConfigRejected,
    DivisionByZero,
    Gl2dError,
    IncompleteData,
    InvalidExponent,
    InvalidWeight,
    NotAUnit,
    ParamMismatch,
    PrecisionExceeded,
    ProbeSkipped,
    SingularMatrix,
    WindowExceeded,
)
from .gf import FieldElement, FieldParams, field, interpolate, lucas_binom, power_sum

__all__ = [
    "CatalogBroken",
    "ConfigRejected",
    "DivisionByZero",
    "FieldElement",
    "FieldParams",
    "Gl2dError",
    "IncompleteData",
    "InvalidExponent",
    "InvalidWeight",
    "NotAUnit",
    "ParamMismatch",
    "PrecisionExceeded",
    "ProbeSkipped",
    "SingularMatrix",
    "WindowExceeded",
    "field",
    "interpolate",
    "lucas_binom",
    "power_sum",
]

__version__ = "0.1.0"
