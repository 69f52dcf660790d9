"""Exception hierarchy shared by all modules."""


class NAEntropyError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgument(NAEntropyError, ValueError):
    pass


class HorizonExceeded(NAEntropyError, IndexError):
    pass


class OracleTooLarge(NAEntropyError):
    """Exact (exhaustive) search requested on an instance beyond the size cap."""


class ResolutionViolation(NAEntropyError, ValueError):
    pass


class UncoveredPoint(NAEntropyError, ValueError):
    pass


class NotATransitionMatrix(NAEntropyError, ValueError):
    pass


class ConvergenceFailure(NAEntropyError, ArithmeticError):
    pass


class CountOverflow(NAEntropyError, OverflowError):
    pass


class UnsupportedMap(NAEntropyError, TypeError):
    pass


class EscapeError(NAEntropyError):
    """An orbit left the union of the partition sets."""

    def __init__(self, message, step):
        super().__init__(message)
        self.step = step


class NoSingletonGuarantee(NAEntropyError):
    pass


class NoBound(NAEntropyError):
    pass


class UnknownName(NAEntropyError, KeyError):
    def __init__(self, name, hint=None):
        self.name = name
        self.hint = hint
        msg = f"unknown name {name!r}"
        if hint:
            msg += f" (did you mean {hint!r}?)"
        super().__init__(msg)

    def __str__(self):
        return self.args[0]


class ConfigError(NAEntropyError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
