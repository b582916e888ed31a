"""
Exception types shared across irsperf.

The CLI maps these onto exit codes: ConfigError -> 2, DomainError and
ConvergenceError -> 3.
"""


class IrsPerfError(Exception):
    """Base class for all irsperf errors."""


class ConfigError(IrsPerfError, ValueError):
    """Invalid or unreadable configuration file."""

    def __init__(self, message: str, key: str = None, line: int = None):
        self.key = key
        self.line = line
        where = []
        if key:
            where.append(f"key '{key}'")
        if line:
            where.append(f"line {line}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(f"{prefix}{message}")


class DomainError(IrsPerfError, ValueError):
    """A numeric argument lies outside the domain of the formula."""


class InvalidDimensionError(DomainError):
    """Array size is not a positive perfect square."""


class NonPositivePowerError(DomainError):
    """Transmit power must be strictly positive."""


class UnboundedError(DomainError):
    """The requested bound does not exist (e.g. zero distortion power)."""


class DegenerateChannelError(DomainError):
    """The effective channel vanishes, so MRT is undefined."""


class ConvergenceError(IrsPerfError, RuntimeError):
    """A solver missed its residual tolerance. Indicates a bug, not bad input."""
