"""Exception types shared across the package."""


class ContractViolationError(ValueError):
    """An argument violates a documented precondition (shape, length, range)."""


class ComputationError(RuntimeError):
    """A numerical backend failed (e.g. SVD non-convergence)."""


class IllPosedError(ValueError):
    """The distance query is ill-posed, e.g. rank(B) < r."""
