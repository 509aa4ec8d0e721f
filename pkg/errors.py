class SDSpaceError(Exception):
    """Base class for every error raised by sdspace"""


class DomainError(SDSpaceError, ValueError):
    """Parameter outside the domain of an operation"""


class DimensionMismatch(SDSpaceError, ValueError):
    pass


class ConvergenceError(SDSpaceError):
    """Raised when an integral cannot converge at all (e.g. outside the Jones window)"""

    def __init__(self, message, err_est=None):
        super().__init__(message)
        self.err_est = err_est


class FiniteDifferenceError(SDSpaceError):
    pass


class MissingDerivativeError(SDSpaceError):
    pass


class ConfigError(SDSpaceError):
    pass


class UnknownSuiteError(ConfigError):
    pass
