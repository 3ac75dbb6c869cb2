"""Exception types shared across the package."""


class QplateError(Exception):
    """Base class for all package-specific errors."""


class OutOfRangeError(QplateError, ValueError):
    """Frequency outside the tabulated data range (no extrapolation)."""


class UnsupportedMediumError(QplateError, ValueError):
    """Medium with gain (negative imaginary permittivity) or beta <= 0."""


class TabulatedParseError(QplateError, ValueError):
    """Malformed tabulated-index file; carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConfigurationError(QplateError, ValueError):
    """Invalid grid, scan, or model configuration."""


class DivergentResummationError(QplateError, ArithmeticError):
    """Multiple-reflection geometric series does not converge."""


class OpaqueStackError(QplateError, ArithmeticError):
    """Total extinction: the partial stack transmits nothing, so the
    recursion step cannot be inverted."""

    def __init__(self, message, layer=None):
        if layer is not None:
            message = f"{message} (layer {layer})"
        super().__init__(message)
        self.layer = layer


class InternalConsistencyError(QplateError, AssertionError):
    """A Cauchy-Schwarz bound that must hold mathematically was violated;
    signals a bug upstream, not bad user input."""


class NumericalFailureError(QplateError, ArithmeticError):
    """A linear solve or quadrature failed unexpectedly."""


class RegionError(QplateError, ValueError):
    """Position argument lies outside the region an operator lives in."""


class UnsupportedOrderError(QplateError, ValueError):
    """Correlation order above the supported m + n <= 4 cap."""


class UnsupportedStateError(QplateError, ValueError):
    """Input state outside what an operation supports (e.g. non-stationary)."""
