"""Exception hierarchy shared by every module."""


class CarThetaError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(CarThetaError, ValueError):
    pass


class NonHermitian(CarThetaError, ValueError):
    pass


class DomainError(CarThetaError, ValueError):
    pass


class IndexOutOfRange(CarThetaError, IndexError):
    pass


class IncompatibleCyclicGrading(CarThetaError, ValueError):
    """A cyclic grading mod q was combined with a Theta for which q*Theta is not integral."""


class NonHomogeneousInput(CarThetaError, ValueError):
    pass


class IncompatibleDenominator(CarThetaError, ValueError):
    """The torus level does not clear the denominators of the deformation matrix."""


class InsufficientBound(CarThetaError, ValueError):
    pass


class NotApplicable(CarThetaError, ValueError):
    pass


class SizeLimit(CarThetaError, ValueError):
    pass


class ParseError(CarThetaError, ValueError):
    pass
