"""Exception types shared across the package."""


class ResourceError(RuntimeError):
    """A requested block exceeds the configured size cap."""

    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required = required


class ConfigError(ValueError):
    """Invalid experiment configuration; ``keys`` names the offending fields."""

    def __init__(self, message: str, keys: list[str] | None = None):
        super().__init__(message)
        self.keys = list(keys or [])
