"""Exception types shared across the package."""


class OptoUPBError(Exception):
    """Base class for all package errors."""


class UndefinedCorrelationError(OptoUPBError, ZeroDivisionError):
    """A correlation ratio has a vanishing denominator."""


class NonConvergenceError(OptoUPBError, RuntimeError):
    """An iterative solve stopped before reaching its tolerance."""

    def __init__(self, message, residual=float("nan"), iterations=0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class ResourceLimitError(OptoUPBError, RuntimeError):
    """A Fock cutoff would have to grow past its configured cap."""

    def __init__(self, message, n_ph_max=None, n_m_max=None, last_change=None):
        super().__init__(message)
        self.n_ph_max = n_ph_max
        self.n_m_max = n_m_max
        self.last_change = last_change


class SingularSystemError(OptoUPBError, ArithmeticError):
    """A linear system is (numerically) singular."""


class PoleError(OptoUPBError, ArithmeticError):
    """A perturbative expression is evaluated on one of its poles."""

    def __init__(self, message, denominator=""):
        super().__init__(message)
        self.denominator = denominator


class ConfigError(OptoUPBError, ValueError):
    """Invalid sweep or CLI configuration."""
