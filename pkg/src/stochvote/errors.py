"""Exception hierarchy shared by every module."""


class StochvoteError(Exception):
    """Base class for all errors raised by the package."""


class InputError(StochvoteError, ValueError):
    """Malformed or inconsistent input (bad labels, non-bijective maps, ...)."""


class DomainError(InputError):
    """Input is well formed but outside the operation's domain."""


class BoundExceeded(StochvoteError):
    """An enumeration would exceed the configured cap."""

    def __init__(self, what, count, cap):
        super().__init__(f"{what}: {count} items exceeds cap {cap}")
        self.what = what
        self.count = count
        self.cap = cap


class UnsupportedCase(StochvoteError):
    """The requested check is not decidable by this engine."""
