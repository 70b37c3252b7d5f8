"""Exception hierarchy shared by the solvers."""


class DoubleIntegratorError(Exception):
    """Base class for all numerical failures raised by this package."""


class QuadraticRootOutsideUnitInterval(DoubleIntegratorError):
    pass


class DegenerateDenominator(DoubleIntegratorError):
    pass


class SingularJacobian(DoubleIntegratorError):
    pass


class NotConverged(DoubleIntegratorError):
    """Raised when an iteration hits its cap.

    The partial result is attached as ``trace`` so callers can still
    inspect how far the solver got.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class NoValidRoot(DoubleIntegratorError):
    pass


class Ambiguous(DoubleIntegratorError):
    pass


class RegimeError(DoubleIntegratorError):
    """The problem instance is not in the regime an operation requires
    (e.g. asking for a best approximation of a feasible problem)."""


class NoCrossing(DoubleIntegratorError):
    pass


class MultipleCrossings(DoubleIntegratorError):
    pass


class LengthMismatch(DoubleIntegratorError, ValueError):
    pass
