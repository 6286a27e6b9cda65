"""Exception types shared across the package."""


class ConvergenceError(RuntimeError):
    """An iterative numerical routine failed to converge within its cap."""
