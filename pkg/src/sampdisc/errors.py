"""Exception types shared across the toolkit."""


class ResolutionError(ValueError):
    """Grid too coarse for the requested construction."""


class DegeneracyError(ValueError):
    """Rank-deficient input where full rank is required."""

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class NumericalError(RuntimeError):
    """A numerical routine failed; ``context`` carries diagnostics."""

    def __init__(self, message, context=None):
        super().__init__(message)
        self.context = dict(context or {})


class ConfigError(ValueError):
    """Invalid or unknown experiment configuration."""


class SchemaMismatchError(ValueError):
    """Serialized document carries an unsupported schema version."""
