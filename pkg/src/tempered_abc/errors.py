"""Exception types raised by :mod:`tempered_abc`."""


class TemperedABCError(Exception):
    """Base class for all package errors."""


class InvalidInputError(TemperedABCError, ValueError):
    """An argument violates a documented precondition."""


class UnsupportedRangeError(TemperedABCError, ValueError):
    """Argument lies outside the range an evaluator supports."""


class DivergenceError(TemperedABCError, ArithmeticError):
    """A quadrature or series produced a non-finite value."""


class BranchError(TemperedABCError, ArithmeticError):
    """A complex power landed on the wrong branch."""


class SolverFailure(TemperedABCError, RuntimeError):
    """The linear system of a time step could not be solved."""


class OracleInvalidError(TemperedABCError, RuntimeError):
    """A reference computation failed its own validity check."""


class StabilityViolation(TemperedABCError, AssertionError):
    """A discrete stability inequality failed beyond its slack."""


class WindowError(TemperedABCError, ValueError):
    """A truncated frequency window leaves too large a tail."""


class ConfigError(TemperedABCError, ValueError):
    """Experiment configuration could not be parsed or validated."""

    def __init__(self, message, *, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)


class TruncationWarning(UserWarning):
    """A truncated Laplace integral left a non-negligible tail."""
