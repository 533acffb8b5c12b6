"""Exception hierarchy for ktlab."""


class KTLabError(Exception):
    """Base class for every error raised by ktlab."""


class InvalidOperator(KTLabError, ValueError):
    """Raised when an operator violates its construction invariants."""


class InvalidMeasure(KTLabError, ValueError):
    """Raised when a measure violates its construction invariants."""


class SpectrumHit(KTLabError):
    """Raised when a resolvent is requested (numerically) on the spectrum."""


class SingularMatrix(KTLabError):
    """Raised when a matrix factorization breaks down."""


class NegativeTime(KTLabError, ValueError):
    pass


class LaplaceDomain(KTLabError):
    """Raised when a Laplace transform is requested outside its half-plane."""


class NotRepresentable(KTLabError):
    """Raised when a convolution leaves the closed measure class."""


class SpectrumInWindow(KTLabError):
    """Raised when a nonzero eigenvalue sits on the imaginary axis inside i[-1, 1]."""


class TailUnbounded(KTLabError):
    pass


class OutOfRange(KTLabError, ValueError):
    pass


class NotAttained(KTLabError):
    pass


class HypothesisFailed(KTLabError):
    """Raised when a check's analytic hypothesis is violated by the input."""


class ConfigError(KTLabError):
    """Base class for configuration problems. Carries an optional line number."""

    def __init__(self, msg, line=None):
        if line is not None:
            msg = f"line {line}: {msg}"
        super().__init__(msg)
        self.line = line


class ParseError(ConfigError):
    pass


class UnknownKey(ConfigError):
    pass


class RangeError(ConfigError):
    pass
