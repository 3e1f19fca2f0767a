"""Exception hierarchy.

``PhysicsError`` subclasses signal a well-posed computation that has no
answer at the requested parameter point (unstable system, no steady state,
singular denominator ...).  ``ConfigError`` signals bad user input.  The
command line maps PhysicsError to exit code 1 and ConfigError to 2.
"""


class OmitloopError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(OmitloopError):
    """Invalid configuration document or parameter value."""


class PhysicsError(OmitloopError):
    """The requested quantity does not exist at this parameter point."""


class SingularMechanicsError(PhysicsError):
    """The coupled mechanical denominator vanishes; fields would diverge."""


class InfeasibleSteadyStateError(PhysicsError):
    """No positive real intracavity photon number solves the pump balance."""


class PoleError(PhysicsError):
    """A response denominator vanished at the requested probe offset."""

    def __init__(self, message, omega=None, which=None):
        super().__init__(message)
        self.omega = omega
        self.which = which


class StencilError(PhysicsError):
    """Finite-difference stencil too coarse to resolve the phase slope."""


class InstabilityError(PhysicsError):
    """Operating point is dynamically unstable."""

    def __init__(self, message, margin=None, where=None):
        super().__init__(message)
        self.margin = margin
        self.where = where


class TrackSelectionError(PhysicsError):
    """Could not identify the tracked eigenvalue pair."""

    def __init__(self, message, eigenvalues=None):
        super().__init__(message)
        self.eigenvalues = eigenvalues


class BracketError(PhysicsError):
    """Scalar search bracket does not contain an interior extremum."""


class BandBoundaryError(PhysicsError):
    """Band maximum sits on the grid edge; the grid is too narrow."""


class BandwidthUndefinedError(PhysicsError):
    """No half-maximum crossing exists for the reported peak."""


class TransientError(PhysicsError):
    """Time-domain transient had not decayed by the end of the horizon."""

    def __init__(self, message, decay=None):
        super().__init__(message)
        self.decay = decay
