"""Exception hierarchy shared by every engine.

Validation problems derive from ``ValueError`` so callers can treat them as
bad input; numerical breakdowns derive from ``ArithmeticError``.
"""


class IndynError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(IndynError, ValueError):
    pass


class UnpairedComplexParameter(ValidationError):
    pass


class DegenerateMomenta(ValidationError):
    pass


class NonPositiveRealMomentum(ValidationError):
    pass


class EmptyTimeGrid(ValidationError):
    pass


class ParseError(ValidationError):
    """Malformed configuration document.

    ``line`` and ``column`` are 1-based when known.
    """

    def __init__(self, message, line=None, column=None, field=None):
        self.line = line
        self.column = column
        self.field = field
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)


class InconsistentSnapshotSize(IndynError, ValueError):
    pass


class EventLocalizationError(IndynError):
    pass


class NoCountChange(EventLocalizationError):
    pass


class MultipleTransitions(EventLocalizationError):
    pass


class NumericalError(IndynError, ArithmeticError):
    pass


class EigenSolverFailure(NumericalError):
    def __init__(self, t, message="eigenvalue solver did not converge"):
        self.t = t
        super().__init__(f"{message} at t={t!r}")


class ZeroMomentumDifference(IndynError, ValueError):
    pass


class ZeroTime(IndynError, ValueError):
    pass


class NonRealDeterminant(NumericalError):
    pass


class RootCountMismatch(NumericalError):
    def __init__(self, expected, found, t):
        self.expected = expected
        self.found = found
        self.t = t
        super().__init__(f"expected {expected} roots at t={t!r}, found {found}")


class DomainError(IndynError, ValueError):
    pass


class GridTooShort(IndynError, ValueError):
    pass


class ParticleCoincidence(NumericalError):
    pass


class RsPoleProximity(NumericalError):
    pass


class CollisionApproach(NumericalError):
    def __init__(self, t, separation):
        self.t = t
        self.separation = separation
        super().__init__(f"particles within {separation:.3e} at t={t!r}")


class StepUnderflow(NumericalError):
    pass
