"""Residues of Dirichlet series counting CM fields, quartic CM enumeration and exact exponents."""

from __future__ import annotations

from .errors import (CatalogError, CatalogTransportError, CmWeylError, DegreeError, EnumerationError,
                     GroupSizeError, HypothesisError, PrecisionError)

__version__ = "0.1.0"

__all__ = [
    "CatalogError",
    "CatalogTransportError",
    "CmWeylError",
    "DegreeError",
    "EnumerationError",
    "GroupSizeError",
    "HypothesisError",
    "PrecisionError",
    "__version__",
]
