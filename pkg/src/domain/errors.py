from __future__ import annotations


class FoldsieveError(Exception):
    """Base class for every error raised by foldsieve operations."""


class DomainError(FoldsieveError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class RangeError(FoldsieveError, ValueError):
    """Query beyond what a prime table (or other precomputed data) covers."""


class CapacityError(FoldsieveError, ValueError):
    """Exhaustive enumeration would exceed the configured budget."""


class NumericError(FoldsieveError, ArithmeticError):
    """Root finding or another numeric procedure failed to converge."""
