"""Exception types raised by the package."""


class UnsupportedDimensionError(ValueError):
    """The requested bound is not defined for this matrix dimension."""


class UnsupportedInputError(ValueError):
    """The pointwise data does not determine the requested quantity."""


class NumericFailure(ArithmeticError):
    """An iterative routine did not converge within its iteration cap."""


class BoundViolation(AssertionError):
    """A tuple exceeded the proven commutator bound. Should never happen."""
