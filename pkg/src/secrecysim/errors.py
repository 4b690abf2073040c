class InvalidParameterError(ValueError):
    """A model parameter is outside its domain (negative variance, SNR, ...)."""


class NoRelayError(InvalidParameterError):
    """A relay-based operation was asked to work with zero relays."""


class InsufficientResolutionError(ValueError):
    """Too few observed events to estimate a log-scale quantity.

    Raised when an intercept probability needed on a log axis is zero; the
    remedy is more trials.
    """


class ConfigError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)
