"""Exception hierarchy shared across the package."""


class MicrepError(Exception):
    """Base class for all package errors."""


class UnboundVariableError(MicrepError):
    """A point left a variable unassigned during evaluation."""

    def __init__(self, name: str):
        super().__init__(f"variable {name!r} is not bound")
        self.name = name


class DimensionMismatchError(MicrepError):
    """An affine substitution does not cover every leaf variable."""


class TreeSyntaxError(MicrepError):
    """Tree grammar violation; carries the character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class SystemFileError(MicrepError):
    """System file parse failure with file/line diagnostics."""

    def __init__(self, message: str, path: str = "<input>", line: int = 0):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


class CapExceededError(MicrepError):
    """A configured resource cap (subsets, enumeration volume, grid) was hit."""


class ValidationError(MicrepError):
    """Auto-mode round escalation exhausted; carries a disagreeing point."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness
