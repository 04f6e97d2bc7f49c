"""Exception hierarchy shared across the library.

Every failure mode raises a subclass of :class:`SecthreshError`, so callers
can catch one base type at API boundaries (the CLI maps them onto exit codes).
"""


class SecthreshError(Exception):
    """Base class for all library errors."""


class DomainError(SecthreshError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NumericalError(SecthreshError, ArithmeticError):
    """A numerical procedure failed: no root bracket, rank deficiency, etc."""


class ConsistencyError(SecthreshError):
    """A computed quantity violates a structural sanity bound."""


class UsageError(SecthreshError):
    """An operation was invoked outside its supported envelope."""


class CertificateError(SecthreshError):
    """A candidate failure certificate did not verify.

    Carries the measured gap so the caller can distinguish "barely failed"
    (solver tolerance issue) from "not even close".
    """

    def __init__(self, message: str, gap: float):
        super().__init__(message)
        self.gap = gap
