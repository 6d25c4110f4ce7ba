"""Exception types shared across the toolkit."""


class ModelInputError(ValueError):
    """Invalid or inconsistent physical/model input."""


class SolverError(RuntimeError):
    """A numerical procedure failed to produce a result.

    ``details`` carries whatever diagnostic data the failing routine had at
    hand (mesh statistics, sampled curves, ...).
    """

    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message)
        self.details = details or {}


class InfeasibleTargetError(ModelInputError):
    """A synthesis target lies outside what the component catalog can reach."""

    def __init__(self, message: str, bounds: tuple[float, float]):
        super().__init__(message)
        self.bounds = bounds
