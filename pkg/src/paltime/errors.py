"""Exception types shared across the package."""


class PalError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(PalError, ValueError):
    """Malformed input text. ``pos`` is a character offset when known."""

    def __init__(self, message: str, pos: int = None, text: str = "", line: int = None):
        self.pos = pos
        self.text = text
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if pos is not None:
            where.append(f"position {pos}")
        super().__init__(message + (" at " + ", ".join(where) if where else ""))


class HorizonError(PalError, ValueError):
    """A formula or intention reaches beyond the bounded horizon."""


class CapExceededError(PalError, RuntimeError):
    """Model enumeration would produce more trees than allowed."""


class UnknownAtomError(PalError, KeyError):
    """A formula mentions an atom outside the tree's atom set."""

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown atom"


class UniverseMismatchError(PalError, ValueError):
    """Objects from two different universes were combined."""
