"""Exception types shared across the package."""


class MofdaError(Exception):
    """Base class for all errors raised by mofda."""


class DimensionError(MofdaError, ValueError):
    """Vector lengths disagree, or a dimension is out of range."""


class DomainError(MofdaError, ValueError):
    """A decision vector lies outside the problem's box bounds."""


class UnknownProblemError(MofdaError, KeyError):
    """No benchmark problem is registered under the requested name."""

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown problem"


class UnsupportedObjectiveCountError(MofdaError, ValueError):
    """The operation supports only a fixed set of objective counts."""


class UndefinedMetricError(MofdaError, ValueError):
    """A quality indicator is undefined for the given input."""


class IncompleteDataError(MofdaError, ValueError):
    """A value matrix has missing cells."""


class ProtocolError(MofdaError, ValueError):
    """A wire record could not be parsed or failed validation."""

    def __init__(self, message, task_id=None):
        super().__init__(message)
        self.task_id = task_id


class RunnerError(MofdaError, RuntimeError):
    """A task failed after its retry; the run produced no archive."""

    def __init__(self, message, task_id=None):
        super().__init__(message)
        self.task_id = task_id
