"""Exception hierarchy shared by all modules."""


class TotipotentError(Exception):
    """Base class for every error raised by this package."""


class OverlapError(TotipotentError, ValueError):
    pass


class MeasureMismatch(TotipotentError, ValueError):
    pass


class InsufficientRoom(TotipotentError, ValueError):
    pass


class NotPeriodic(TotipotentError, ValueError):
    pass


class GridMismatch(TotipotentError, ValueError):
    pass


class NotDyadic(GridMismatch):
    pass


class NotExtending(TotipotentError, ValueError):
    """A transformation was required to extend a partial map but does not."""


class LevelMismatch(TotipotentError, ValueError):
    pass


class CapExceeded(TotipotentError):
    pass


class Disconnected(TotipotentError, ValueError):
    pass


class NoMissingEdge(TotipotentError, ValueError):
    pass


class AlreadyComplete(TotipotentError, ValueError):
    pass


class SerializationError(TotipotentError, ValueError):
    pass


class ConfigError(TotipotentError, ValueError):
    pass


class Infeasible(TotipotentError):
    """Parameters are valid but the construction cannot be carried out."""
