"""Exception types shared across the package."""

from __future__ import annotations


class PrecisionInsufficient(ArithmeticError):
    """A certified comparison could not separate its candidates.

    Raised when the tracked error bounds are too large to certify a
    nearest-point winner, a nonzero denominator, or an ordering.  The
    operation is safe to retry at higher precision.
    """


class EnumerationTooLarge(ValueError):
    """A lattice enumeration would exceed the configured guard bound."""


class ZeroDenominator(ZeroDivisionError):
    """A ring rational was constructed or inverted with denominator zero."""


class ParseError(ValueError):
    """Command-line input could not be parsed."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class IndexOutOfRange(IndexError):
    """An expansion or Q-pair index outside the computed range."""
