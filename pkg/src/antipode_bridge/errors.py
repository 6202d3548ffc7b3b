"""Exception types raised across the package."""


class AntipodeBridgeError(Exception):
    """Base class for all package errors."""


class DomainError(AntipodeBridgeError, ValueError):
    """A function was evaluated outside its domain (e.g. the projection on the bottom facet)."""


class InvariantError(AntipodeBridgeError, ValueError):
    """A value object was constructed with data violating its invariants."""


class SpecError(AntipodeBridgeError, ValueError):
    """A cover specification is malformed or inconsistent."""


class PreconditionError(AntipodeBridgeError):
    """An operation was called on input that fails its stated precondition."""


class ExposureNonEmpty(AntipodeBridgeError):
    """The bottom facet has exposed points, so the sets A_i cannot cover the sphere."""

    def __init__(self, exposed):
        self.exposed = list(exposed)
        super().__init__(f"{len(self.exposed)} exposed bottom grid point(s)")
