"""Exception hierarchy shared by all evaluators."""


class ZamintError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ZamintError, ValueError):
    """Parameters lie outside the region where the quantity is defined."""


class PoleError(DomainError):
    """A Gamma-function argument sits on (or within 1e-12 of) a pole."""


class CoincidenceError(ZamintError, ValueError):
    """Two points coincide where the kernel has a non-positive exponent."""


class BudgetExhaustedError(ZamintError, RuntimeError):
    """A deterministic rule could not reach its tolerance within budget."""


class NonIntegrableError(ZamintError, ArithmeticError):
    """Refinement diverged or produced non-finite values."""


class NonFiniteSampleError(ZamintError, FloatingPointError):
    """A Monte Carlo integrand returned NaN or infinity at a sample."""


class VarianceWarning(UserWarning):
    """Plain Monte Carlo has infinite variance here; error bars are unreliable."""
