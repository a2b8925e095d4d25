"""Exception hierarchy shared by all modules."""


class HolonomyError(Exception):
    """Base class for every error raised by lorentzhol."""


class NotLorentzError(HolonomyError):
    pass


class NotParabolicError(HolonomyError):
    pass


class NotSubalgebraError(HolonomyError):
    pass


class IndecomposabilityError(HolonomyError):
    pass


class EpimorphismDeficiency(HolonomyError):
    pass


class PreconditionError(HolonomyError):
    pass


class DomainError(HolonomyError):
    """A point or path leaves the chart domain."""


class IntegrationFailure(HolonomyError):
    pass


class NotIsometryError(HolonomyError):
    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class DiscontinuityRefusal(HolonomyError):
    """Raised when a deck group is known not to act properly discontinuously."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ScenarioError(HolonomyError):
    pass
