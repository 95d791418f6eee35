"""Exception and warning types shared across the package."""


class LieError(ValueError):
    """Base class for invalid Lie-group operations."""


class DimensionError(LieError):
    """Tangent or matrix dimensions do not match the group."""


class FrameMismatchError(LieError):
    """A frame-tagged quantity was used with an operator of the other frame."""


class LogBranchError(LieError):
    """The principal logarithm is not unique (relative rotation angle of pi)."""


class SingularJacobianError(LieError):
    """An inverse Jacobian was requested at a singular angle (2k*pi, k >= 1)."""


class AntipodalError(LieError):
    """Interpolation endpoints are antipodal, so the geodesic is not unique."""


class UndefinedScrewError(LieError):
    """Zero motion has no screw axis."""


class NotPSDError(ValueError):
    """A covariance matrix is not symmetric positive semidefinite."""


class NonFiniteError(ArithmeticError):
    """A derivative or model evaluation returned a non-finite value."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class GimbalLockWarning(UserWarning):
    """Euler pitch is at +-pi/2; roll was set to zero and folded into yaw."""
