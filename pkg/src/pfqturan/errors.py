"""Exception hierarchy shared by all modules."""


class PfqError(Exception):
    """Base class for every error raised by this package."""


class PoleError(PfqError, ValueError):
    """A lower parameter is a non-positive integer."""


class DomainError(PfqError, ValueError):
    """Argument outside the region where the requested quantity is defined."""


class DimensionError(PfqError, ValueError):
    """Parameter vectors have incompatible lengths."""


class HypothesisError(PfqError, ValueError):
    """A theorem verifier was called on inputs violating its hypotheses."""


class ConfigError(PfqError, ValueError):
    """Invalid scan configuration or command-line input."""


class ConvergenceError(PfqError, ArithmeticError):
    """A series did not meet its stopping rule within the term budget."""


class TruncationError(PfqError, ArithmeticError):
    """No admissible truncation degree exists below the configured cap."""
