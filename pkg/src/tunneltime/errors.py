"""Exception types raised by the library."""


class TunnelTimeError(Exception):
    """Base class for all errors raised by tunneltime."""


class InvalidParameterError(TunnelTimeError, ValueError):
    pass


class OutOfRangeError(TunnelTimeError, ValueError):
    pass


class GridTooCoarseError(TunnelTimeError):
    """Raised when a momentum grid cannot resolve the phase of A(kappa)."""

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class UnderflowError(TunnelTimeError, ArithmeticError):
    pass


class NormalizationError(TunnelTimeError, ValueError):
    def __init__(self, message, integral=None):
        super().__init__(message)
        self.integral = integral


class ResolutionError(TunnelTimeError, ValueError):
    def __init__(self, message, required_sigma_max=None):
        super().__init__(message)
        self.required_sigma_max = required_sigma_max


class ConfigurationError(TunnelTimeError, ValueError):
    """An evolution or experiment setup violates one of its bounds."""


class NotAsymptoticError(TunnelTimeError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
