"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument violates an operation's stated precondition."""


class CapExceededError(RuntimeError):
    """A computation would exceed a configured resource cap."""


class ConfigError(ValueError):
    """An experiment configuration failed validation (CLI exit code 2)."""
