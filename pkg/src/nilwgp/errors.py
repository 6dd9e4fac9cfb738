class NilwgpError(Exception):
    """Base class for library errors."""


class ModeMismatchError(NilwgpError, TypeError):
    pass


class DivisionByZeroError(NilwgpError, ZeroDivisionError):
    pass


class ArityError(NilwgpError, ValueError):
    pass


class ShapeError(NilwgpError, ValueError):
    pass


class BudgetExceeded(NilwgpError, RuntimeError):
    """Raised instead of silently truncating an enumeration."""


class GuardError(NilwgpError, ValueError):
    """A size guard (basis length, catalog size, symbolic swell) was exceeded."""


class PreconditionError(NilwgpError, ValueError):
    pass


class NotAnIdealError(NilwgpError, ValueError):
    pass


class SpanError(NilwgpError, ValueError):
    pass


class KindMismatchError(NilwgpError, TypeError):
    pass


class ConfigError(NilwgpError, ValueError):
    pass
