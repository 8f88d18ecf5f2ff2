"""Exception hierarchy shared by every stage of the construction."""


class ArcStackError(Exception):
    """Base class for all library errors."""


class ResourceError(ArcStackError):
    """A big-integer value exceeded the configured bit budget."""


class HorizonExhausted(ArcStackError):
    """The finite sample window is too small for a homogeneous refinement.

    This signals that the desk-scale simulation ran out of sample points,
    not that the underlying mathematics failed.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DependenceDetected(ArcStackError):
    """A family declared independent turned out to be dependent on the window."""


class Unsupported(ArcStackError):
    """A value law or limit falls outside what the sequence DSL can decide."""


class CapExceeded(ArcStackError):
    """Density search passed its configured length cap."""


class NotFound(ArcStackError):
    """A subarc scan found no admissible point."""


class LevelFailed(ArcStackError):
    def __init__(self, n, reason):
        super().__init__(f"level {n}: {reason}")
        self.n = n
        self.reason = reason


class StageFailed(ArcStackError):
    def __init__(self, m, reason):
        super().__init__(f"stage {m}: {reason}")
        self.m = m
        self.reason = reason


class ScenarioInvalid(ArcStackError):
    """The scenario file failed validation."""


class InternalAssertion(ArcStackError):
    """A postcondition that the construction guarantees did not hold."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
