"""Exception hierarchy shared by all modules."""


class QsubError(Exception):
    """Base class for every error raised by this package."""


class ResourceError(QsubError):
    """A requested register exceeds the simulator cap."""


class QubitIndexError(QsubError, IndexError):
    """A qubit index is out of range, duplicated, or overlaps another operand."""


class ArityError(QsubError, ValueError):
    """A gate was applied to the wrong number of targets."""


class VariantError(QsubError):
    """An inverse/controlled/power variant was requested for a non-adjointable body."""


class RuntimeFault(QsubError):
    """A fault raised while interpreting a program.

    ``site`` is the statement path (subroutine name, index path) where the
    fault happened.
    """

    def __init__(self, message, site=None):
        super().__init__(message)
        self.site = site


class DivergenceFault(RuntimeFault):
    """A repeat-until loop exceeded its iteration budget."""


class IRError(QsubError):
    """A malformed IR value (undefined name, bad arity, type error)."""


class ParseError(QsubError, ValueError):
    """Malformed text input; ``position`` is a 0-based character offset or line number."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at {position})"
        super().__init__(message)
        self.position = position


class ConfigError(QsubError, ValueError):
    """Invalid experiment or suite configuration."""


class UnsupportedCheck(QsubError):
    """A checker was asked to run outside its supported range."""
