"""Exception types shared across the library."""


class DomainError(ValueError):
    """A parameter is outside the mathematical domain of an operation."""


class GridMismatchError(ValueError):
    """Two objects live on incompatible grids."""


class ResolutionError(RuntimeError):
    """The requested computation is not resolved by the supplied grid."""


class UnsupportedFeatureError(NotImplementedError):
    """A parameter combination that is declared out of scope."""


class ConfigError(ValueError):
    """Invalid experiment configuration."""
