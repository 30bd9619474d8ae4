"""Exception hierarchy shared by all modules."""


class ParabolicShiftError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ParabolicShiftError, ValueError):
    """A point lies outside the domain of the operation (e.g. Im z <= 0, |z| >= 1)."""


class UndefinedMoment(ParabolicShiftError, ArithmeticError):
    """The signed first moment was requested but an absolute moment diverges."""


class QuadratureFailure(ParabolicShiftError, ArithmeticError):
    """Adaptive refinement hit the depth limit without stabilizing."""


class NumericalBreakdown(ParabolicShiftError, ArithmeticError):
    """The computed orbit violates Im-monotonicity or produced a non-finite value."""


class Overflow(ParabolicShiftError, OverflowError):
    """An orbit point left the representable range."""


class InsufficientOrbit(ParabolicShiftError, ValueError):
    """The orbit is too short for the requested estimator."""


class NotFiniteShift(ParabolicShiftError, ValueError):
    """A finite-shift map was required but the classifier rejected the map."""


class ParseError(ParabolicShiftError, ValueError):
    """The configuration text could not be parsed."""


class ValidationError(ParabolicShiftError, ValueError):
    """The configuration parsed but violates a field constraint."""
