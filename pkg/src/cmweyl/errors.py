"""Exception hierarchy shared by the cmweyl modules."""

from __future__ import annotations


class CmWeylError(Exception):
    """Base class for every error raised by this package."""


class GroupSizeError(CmWeylError):
    """Raised when a group closure would exceed the configured element cap."""


class DegreeError(CmWeylError):
    """Raised when a degree is outside the supported range."""


class CatalogError(CmWeylError):
    """Raised for malformed or inconsistent field records."""


class CatalogTransportError(CatalogError):
    """Raised when a remote catalog cannot be reached after retries."""

    def __init__(self, message: str, attempts: int) -> None:
        super().__init__(f"{message} (after {attempts} attempts)")
        self.attempts = attempts


class PrecisionError(CmWeylError):
    """Raised when a requested tolerance cannot be met."""


class HypothesisError(CmWeylError):
    """Raised when exponent inputs violate the standing hypotheses."""


class EnumerationError(CmWeylError):
    """Raised for invalid CM enumeration requests."""
