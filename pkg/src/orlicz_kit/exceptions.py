"""Exception types shared across the package."""


class OrliczError(Exception):
    """Base class for all errors raised by orlicz_kit."""


class DomainError(OrliczError, ValueError):
    """An argument lies outside the domain where a value can be produced."""


class IndexZeroError(DomainError):
    """The lower index appears to vanish, so no halving constant exists."""


class PreconditionError(OrliczError, ValueError):
    """An operation was called on input violating its stated precondition."""


class SizeError(OrliczError, ValueError):
    """A sign enumeration or block would exceed the configured cap."""


class SearchFailed(OrliczError, RuntimeError):
    """No witness satisfying a gap inequality was found on the search grid."""
