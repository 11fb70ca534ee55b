"""Exception types shared across the toolkit."""


class QRatioError(Exception):
    """Base class for all toolkit errors."""


class DomainError(QRatioError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CatalogKeyError(QRatioError, KeyError):
    """Unknown catalog entry; the message lists the available names."""

    def __str__(self):  # KeyError quotes its args; keep the message readable
        return self.args[0] if self.args else ""


class ResolutionError(QRatioError, ValueError):
    """A wave packet is under-resolved or too close to the grid boundary."""


class StepSizeError(QRatioError, ValueError):
    """The requested time step violates a stability bound."""


class BoundaryError(QRatioError, RuntimeError):
    """Probability reached the outer grid margin (periodic wraparound risk)."""


class ConvergenceError(QRatioError, RuntimeError):
    """An iterative refinement failed to converge to tolerance."""


class CoherenceUndefinedError(QRatioError, ValueError):
    """Coherence requested at a point with vanishing probability density."""


class ConfigError(QRatioError, ValueError):
    """A scenario configuration file is malformed; carries a line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
