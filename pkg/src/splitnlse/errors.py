"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Raised when an argument violates an operation's preconditions."""


class DivergenceError(ArithmeticError):
    """Raised when a time integration produces non-finite coefficients."""

    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"non-finite coefficients detected at step {step}")


class ConfigError(ValueError):
    """Raised for malformed or inconsistent experiment configurations."""


class CacheError(IOError):
    """Raised when a reference cache file is corrupted or unreadable."""
