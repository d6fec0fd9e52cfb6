"""Exception hierarchy shared by all strebel modules."""


class StrebelError(Exception):
    """Base class for every error raised by this package."""


class SpecParseError(StrebelError, ValueError):
    """A surface, pair, params or domain document could not be parsed."""


class ValidationError(StrebelError, ValueError):
    def __init__(self, report):
        self.report = report
        super().__init__("invalid cylinder decomposition: " + "; ".join(report.violations))


class DomainError(StrebelError, ValueError):
    """An argument lies outside the domain of the evaluated map or formula."""


class InvalidOrderError(DomainError):
    pass


class MissingInputError(StrebelError, ValueError):
    pass


class UseReciprocalError(DomainError):
    """Raised for modulus ratios M <= 1 where the caller has to swap the roles of the rays."""


class SingularConfigurationError(StrebelError, ArithmeticError):
    pass


class HomotopyViolationError(StrebelError):
    """The twist audit |arg c1 + arg c2| < 2*pi failed."""


class NotOrientationPreservingError(StrebelError, ArithmeticError):
    pass


class NumericalInstabilityError(StrebelError, ArithmeticError):
    """Finite differences at h and h/2 disagree beyond the accepted tolerance."""


class UndefinedCrossRatioError(StrebelError, ZeroDivisionError):
    pass


class SolverError(StrebelError, RuntimeError):
    def __init__(self, message, residual=float("nan")):
        self.residual = residual
        super().__init__(f"{message} (residual={residual:.3e})")
