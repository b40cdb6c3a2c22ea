"""Exception types raised across the package."""


class CouetteError(Exception):
    """Base class for all numerical and validation failures."""


class ValidationError(CouetteError, ValueError):
    """Input violates a documented precondition."""


class NumericalError(CouetteError, RuntimeError):
    """A solver failed to reach its target."""


# profiles
class NonMonotoneProfile(ValidationError):
    pass


class NotOdd(ValidationError):
    pass


class NonPositiveB0(ValidationError):
    pass


# spectral1d
class GridTooCoarse(ValidationError):
    pass


class OutOfRange(ValidationError):
    pass


class NotNormalized(ValidationError):
    pass


class NoConvergence(NumericalError):
    pass


# sobolev
class UnresolvedField(NumericalError):
    pass


class ZeroMeanViolation(ValidationError):
    pass


class NonVanishing(ValidationError):
    pass


class ExponentOutOfRange(ValidationError):
    pass


# steady
class NewtonDiverged(NumericalError):
    def __init__(self, message, last_state=None):
        super().__init__(message)
        self.last_state = last_state


class BifurcationNotFound(NumericalError):
    pass


class BracketInvalid(ValidationError):
    pass


class DegenerateHessian(NumericalError):
    pass


# damping
class OscillationUnresolved(NumericalError):
    pass


class NonPositiveNorm(NumericalError):
    pass


# stability
class NotMonotone(ValidationError):
    pass


class RangeEscape(UserWarning):
    """The perturbed stream function entered the extension zone of f."""
