"""Exception types shared across the toolkit."""


class CrisisnetError(Exception):
    """Base class for all toolkit errors."""


class InputFormatError(CrisisnetError):
    """Input file is unreadable or mostly malformed."""


class EmptyGraphError(CrisisnetError):
    """An activity threshold excluded every user."""


class DisconnectedGraphError(CrisisnetError):
    """A metric that requires a connected graph got a disconnected one."""


class UndefinedMetricError(CrisisnetError):
    """Metric is undefined for this input (e.g. density of a 1-node graph)."""


class InsufficientTailError(CrisisnetError):
    """Too few points above x_min to fit a tail distribution."""


class DegenerateSampleError(CrisisnetError):
    """Sample leaves no information to fit (e.g. all tail values identical)."""


class FitError(CrisisnetError):
    """A numeric fit failed."""


class ConvergenceError(FitError):
    """An iterative optimizer hit its iteration cap before converging."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class SingularDesignError(CrisisnetError):
    """Regression design matrix is rank deficient or contains a constant column."""
