"""Exception types raised on invalid inputs."""


class InvalidDimensionError(ValueError):
    pass


class InvalidSparsityError(ValueError):
    pass


class DegenerateSignalError(ValueError):
    """Noise level requested for a signal whose image ``K x0`` vanishes."""


class UndefinedErrorError(ValueError):
    """Relative error requested against an all-zero ground truth."""


class UnsupportedSizeError(ValueError):
    """Size is not a power of two where one is required."""


class SingularKernelError(ValueError):
    """Field point too close to (or inside) the current-carrying shell."""
