"""Exception types raised across the package."""


class DomainError(ValueError):
    """A value lies outside the open interval or manifold it must belong to."""


class InvalidConstantError(ValueError):
    """The angle constant C is zero, negative or inconsistent with theta."""


class SingularPointError(ValueError):
    """The distance function is not differentiable at the requested point."""


class OutOfRegionError(ValueError):
    """A point lies outside the validity region of a distance field."""


class RangeError(ValueError):
    """A value lies outside the attainable range of h^{-1}."""

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class StepError(ValueError):
    """A finite-difference step underflows or leaves the domain."""


class FocalPointError(ArithmeticError):
    """A parallel hypersurface reaches a focal point."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class UnsupportedAmbientError(ValueError):
    """The operation is only defined for a different ambient space."""
