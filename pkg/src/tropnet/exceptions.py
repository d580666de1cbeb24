"""
Custom exceptions for tropnet
"""

from typing import Optional


class TropNetError(Exception):
    """Base exception for tropnet"""

    pass


class ConfigurationError(TropNetError):
    """Configuration-related errors"""

    pass


class ValidationError(TropNetError):
    """Input validation errors"""

    pass


class DimensionMismatchError(ValidationError):
    """Operands disagree on a row count, column count or ambient dimension"""

    pass


class NonFiniteValueError(ValidationError):
    """A NaN or infinite double was offered where an exact rational is needed"""

    pass


class EmptyPolyhedronError(ValidationError):
    """An operation that needs a point of the polyhedron was given an empty one"""

    pass


class SolverError(TropNetError):
    """An LP witness or certificate failed exact verification"""

    pass


class SubsetCapExceededError(TropNetError):
    """Subset enumeration was requested beyond the configured cap"""

    def __init__(self, rows: int, cap: int):
        self.rows = rows
        self.cap = cap
        super().__init__(
            f"{rows} rows need 2^{rows} subsets, above the cap of {cap}; "
            f"raise --subset-cap or use the lower/upper bounds"
        )


class ModelFileError(TropNetError):
    """Malformed model, polynomial, matrix or point files"""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        location = path or "<input>"
        if line is not None:
            location = f"{location}:{line}"
        super().__init__(f"{location}: {message}")
