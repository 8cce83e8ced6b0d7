"""Exception hierarchy shared by every module in the package."""


class QSNRError(Exception):
    """Base class for all package errors."""


class ValidationError(QSNRError, ValueError):
    """An operator failed a structural check (Hermiticity, unitarity, range)."""


class NotAStateError(ValidationError):
    """A matrix is not a valid density matrix."""


class DimensionMismatchError(QSNRError, ValueError):
    """Operands have incompatible dimensions."""


class DegenerateError(QSNRError, ValueError):
    """A quantity is undefined for the given degenerate input.

    Raised for example when both standard deviations vanish (no optimal
    shift exists) or when both second moments of an observable vanish.
    """


class SingularPointError(DegenerateError):
    """The reduced two-level function is evaluated where its denominator vanishes."""


class BoundaryCaseError(QSNRError, ValueError):
    """The stationary point formula does not apply (P == 1 or Q == 1)."""


class NoSignalError(QSNRError, ValueError):
    """The two states are identical, so no observable can produce a signal."""


class TruncationError(QSNRError, ValueError):
    """A Fock-space truncation discards more probability mass than allowed."""


class ParseError(QSNRError, ValueError):
    """An input document is not well-formed JSON or misses required fields."""
