"""Exception types shared across the package."""


class ValidationError(ValueError):
    """A domain object was constructed with invalid parameters."""


class ConfigError(ValidationError):
    """A simulation config failed to parse or violates an invariant."""
