"""Exception types shared across the package."""


class ToralConjError(Exception):
    """Base class for all package errors."""


class InputError(ToralConjError):
    """Malformed matrix or polynomial input."""


class ResourceLimitError(ToralConjError):
    """A configured cap (depth, exponent, bit length) was exceeded."""


class InfiniteQuotientError(ToralConjError):
    """Relation matrix is singular, so the quotient is not finite."""


class IllFormedActionError(ToralConjError):
    """Action matrix does not preserve the relation lattice."""


class UnsupportedError(ToralConjError):
    """Input outside the supported scope (e.g. reducible characteristic polynomial)."""


class InternalInconsistencyError(ToralConjError):
    """Two independently computed certificates contradict each other."""
