"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument is outside the domain of the operation."""


class ConstructionError(ValueError):
    """A construction cannot be carried out with the given inputs."""


class InfeasibleError(RuntimeError):
    """The requested computation exceeds its budget or size limits."""

    def __init__(self, message: str, budget: int | None = None):
        super().__init__(message)
        self.budget = budget
