"""Exception hierarchy for the multilayer heat solver."""


class LayerHeatError(Exception):
    """Base class for every error raised by :mod:`layerheat`."""


# -- problem validation -------------------------------------------------------

class InvalidProblem(LayerHeatError, ValueError):
    """A problem definition violates one of its structural invariants.

    ``violations`` lists every problem found, not only the first one.
    """

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = list(violations) if violations else [message]


class NonIncreasingBreakpoints(InvalidProblem):
    pass


class NonPositiveSigma(InvalidProblem):
    pass


class ZeroContactCoefficient(InvalidProblem):
    pass


class DegenerateBoundaryRow(InvalidProblem):
    pass


class LengthMismatch(InvalidProblem):
    pass


class InvalidSignal(InvalidProblem):
    pass


# -- numerics -----------------------------------------------------------------

class NumericalFailure(LayerHeatError, ArithmeticError):
    """A numerical stage could not produce a trustworthy result."""


class OverflowAtArgument(NumericalFailure, OverflowError):
    """A quantity would exceed the floating range at the requested argument."""


class SingularNode(NumericalFailure):
    """The spectral system is numerically rank deficient at a contour node."""


class TooManyOverflowNodes(NumericalFailure):
    pass


class SingularStep(NumericalFailure):
    pass


class WrongInterfaceKind(LayerHeatError, ValueError):
    pass


class NonPositiveTime(LayerHeatError, ValueError):
    pass


class OutOfDomain(LayerHeatError, ValueError):
    pass


class TableHorizonTooSmall(LayerHeatError, ValueError):
    pass


class UnsupportedSetup(LayerHeatError, ValueError):
    pass


class NoSteadyState(LayerHeatError, ValueError):
    pass


class GridMismatch(LayerHeatError, ValueError):
    pass


class UnknownExample(LayerHeatError, KeyError):
    pass
