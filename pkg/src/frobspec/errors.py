"""Exception hierarchy shared by every frobspec module."""


class FrobspecError(Exception):
    """Base class for all errors raised by this package."""


class ZeroElement(FrobspecError, ValueError):
    """A spectrum element has modulus at or below the zero threshold."""


class EmptyMultiset(FrobspecError, ValueError):
    """A multiset with no elements was requested or produced."""


class NotUnitModulus(FrobspecError, ValueError):
    """A rotation factor does not lie on the unit circle."""


class Overflow(FrobspecError, ArithmeticError):
    """A floating point power or trace left the double range."""


class NotIrreducible(FrobspecError, ValueError):
    pass


class EigenFailure(FrobspecError, RuntimeError):
    """Eigenvalue extraction did not meet its residual check."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class InconsistentAnalysis(FrobspecError, RuntimeError):
    """Two independent algorithms disagreed on the same question."""


class NotFrobenius(FrobspecError, ValueError):
    pass


class MalformedPeripheral(FrobspecError, ValueError):
    """The peripheral set is not a rotated copy of the p-th roots of unity."""


class QuotientFailure(FrobspecError, ValueError):
    """A power-map multiplicity was not divisible by the period."""


class NotAdmissible(FrobspecError, ValueError):
    """The target spectrum fails the primitive realizability conditions."""


class WrongQuotientRealizer(FrobspecError, ValueError):
    """The supplied matrix does not realize the quotient spectrum."""


class CertificateFailed(FrobspecError, RuntimeError):
    """A constructed matrix failed its own verification."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class StructureMismatch(CertificateFailed):
    """The lifted characteristic polynomial identity did not hold."""


class InputError(FrobspecError, ValueError):
    """Malformed user input (spectrum literal, polynomial, matrix file)."""
