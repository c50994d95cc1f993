"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ParameterError(ValueError):
    """System or control parameters violate their documented constraints."""


class ConfigError(ValueError):
    """A run configuration is malformed or inconsistent."""
