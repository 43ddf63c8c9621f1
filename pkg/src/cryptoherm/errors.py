"""Exception hierarchy shared by all modules."""


class CryptohermError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(CryptohermError, ValueError):
    """Operands have incompatible shapes."""


class BreakdownError(CryptohermError, ArithmeticError):
    """A recurrence hit a vanishing divisor.

    ``index`` is the 1-based position of the offending matrix element, following
    the usual row/column numbering of the Hamiltonian.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class SpectrumError(CryptohermError, ArithmeticError):
    """The spectrum is complex or degenerate."""


class NotPositiveDefiniteError(CryptohermError, ValueError):
    """A metric candidate is not positive definite."""


class ResidualError(CryptohermError, ArithmeticError):
    """A computed quantity fails its self-consistency check."""
