"""Exception taxonomy shared across the package."""


class LagflowError(Exception):
    """Base class for all lagflow errors."""


class DegenerateSegment(LagflowError):
    """A discrete segment or derivative collapsed below resolution."""


class OriginContact(LagflowError):
    """A point of the curve reached the origin where r > 0 is required."""


class NonIntegerWinding(LagflowError):
    """An angle sum failed to land on an integer multiple of 2*pi."""


class RefineGrid(LagflowError):
    """A single-node angle increment reached pi; the grid is too coarse."""


class NotStarshaped(LagflowError):
    """Operation requires a starshaped curve (beta undefined otherwise)."""


class InvalidSpec(LagflowError):
    """Scenario or configuration parameters violate their invariants."""


class BlowUp(LagflowError):
    """The driving speed exceeded the configured blow-up threshold."""


class StepUnderflow(LagflowError):
    """The stable time step fell below representable resolution."""


class BadHorizon(LagflowError):
    """Rescaling requested with an estimated singular time in the past."""


class InsufficientBlowup(LagflowError):
    """Trajectory never developed enough curvature growth to classify."""


class NoRoot(LagflowError):
    """Shooting bracket does not contain a sign change of the defect."""


class NotClosed(LagflowError):
    """Shooting iteration exhausted without closing the profile."""


class NoReturn(LagflowError):
    """Profile integration exhausted its arc budget before the event."""


class ExitEmptyGrid(LagflowError):
    """A parameter sweep was requested over an empty grid."""
