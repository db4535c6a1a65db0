"""Exception types shared across the package."""


class Gl2dError(Exception):
    """Base class for all package errors."""


class DivisionByZero(Gl2dError, ZeroDivisionError):
    """Inversion of the zero element of a field."""


class InvalidExponent(Gl2dError, ValueError):
    """Exponent outside its permitted range or with ill-formed base-p digits."""


class IncompleteData(Gl2dError, ValueError):
    """Interpolation asked for a map that is not total on its domain."""


class ParamMismatch(Gl2dError, ValueError):
    """Operands built over different parameter objects."""


class NotAUnit(Gl2dError, ArithmeticError):
    """Inversion of a ring element whose leading digit vanishes."""


class PrecisionExceeded(Gl2dError, ArithmeticError):
    """A digit beyond the tracked validity of an element was required."""


class SingularMatrix(Gl2dError, ArithmeticError):
    """A 2x2 matrix required to be invertible is not."""


class InvalidWeight(Gl2dError, ValueError):
    """A weight-space construction violates its exponent bounds."""


class CatalogBroken(Gl2dError, AssertionError):
    """A preimage witness failed re-verification; engine bug or formula mismatch."""


class WindowExceeded(Gl2dError, ValueError):
    """An element is supported outside the depth window of a span computation."""


class ConfigRejected(Gl2dError, ValueError):
    """A configuration violates a structural or hypothesis constraint."""


class ProbeSkipped(Gl2dError):
    """The completeness probe cannot run under the given configuration."""
