"""Exception and warning types shared across the package."""


class RiskProfileError(Exception):
    """Base class for errors raised by this package."""


class DomainError(RiskProfileError, ValueError):
    """An argument lies outside the mathematical domain of a function."""


class ParameterError(RiskProfileError, ValueError):
    """A distribution or coupling parameter violates its constraints."""


class InputError(RiskProfileError, ValueError):
    """Malformed input data (distributions, forecast sets, densities)."""


class DivergentIntegralError(RiskProfileError, ArithmeticError):
    """A quadrature did not converge because the integral diverges."""


class IdentityError(RiskProfileError, ArithmeticError):
    """Two routes to the same quantity disagreed beyond tolerance."""


class SupportMismatchWarning(RuntimeWarning):
    """Probability mass sits where the reference distribution has none."""


class ClampWarning(RuntimeWarning):
    """A fitted parameter was clamped to keep the model well defined."""
