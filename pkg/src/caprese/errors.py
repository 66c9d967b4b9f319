"""Exception hierarchy shared by every module."""


class CapreseError(Exception):
    pass


class ParseError(CapreseError):
    def __init__(self, message, row=None, col=None):
        self.row = row
        self.col = col
        if row is not None:
            message = f"{message} at ({row},{col})"
        super().__init__(message)


class DuplicateEvent(CapreseError):
    pass


class ShapeError(CapreseError):
    pass


class ValidationError(CapreseError):
    """Raised when a matrix fails the probability or distinguishability gate."""

    def __init__(self, violations):
        self.violations = list(violations)
        listing = "; ".join(str(v) for v in self.violations)
        super().__init__(f"matrix failed validation: {listing}")


class DivisionGuard(CapreseError, ZeroDivisionError):
    pass


class RootNotScorable(CapreseError):
    pass


class Unreachable(CapreseError):
    pass


class ConfigError(CapreseError):
    pass


class SizeError(CapreseError):
    pass


class LabelMismatch(CapreseError):
    pass


class FitError(CapreseError):
    pass
