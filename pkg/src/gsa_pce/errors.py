"""Exception hierarchy shared by all gsa_pce modules."""


class GsaPceError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(GsaPceError):
    """Invalid configuration, CLI usage, or analysis request."""


class DataError(GsaPceError):
    """Malformed or unusable input data (parse failures, non-finite values)."""


class DimensionError(GsaPceError):
    """Array shapes or lengths do not line up."""


class BasisSizeError(GsaPceError):
    """The requested basis does not fit in a 64-bit index space."""


class InvalidPermutationError(GsaPceError):
    """The supplied input ordering is not a bijection on the input positions."""


class InsufficientSamplesError(GsaPceError):
    """Fewer samples than basis terms; the empirical Gram matrix is singular."""


class LinearDependenceError(GsaPceError):
    """A basis polynomial is numerically dependent on its predecessors."""

    def __init__(self, message: str, position: int, monomial_label: str):
        super().__init__(message)
        self.position = position
        self.monomial_label = monomial_label


class NumericalError(GsaPceError):
    """Non-finite intermediate values or a failed numerical construction."""


class DegenerateOutputWarning(UserWarning):
    """The output column is constant; variance-based indices are undefined."""
