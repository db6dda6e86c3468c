"""Exception types shared across the package."""


class CrossFieldError(Exception):
    """Base class for package errors."""


class ConfigError(CrossFieldError, ValueError):
    """Invalid configuration value; ``key`` names the offending field."""

    def __init__(self, key: str, message: str):
        self.key = key
        self.message = message
        super().__init__(f"{key}: {message}")


class DomainError(CrossFieldError, ValueError):
    """Input outside the mathematical domain of an operation."""


class ConsistencyError(CrossFieldError, RuntimeError):
    """Internal shape or bookkeeping mismatch; indicates a bug."""
