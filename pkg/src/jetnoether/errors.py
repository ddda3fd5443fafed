"""Exception hierarchy.  Each class maps to one CLI exit code."""


class JetError(Exception):
    exit_code = 1


class ParseError(JetError):
    """Malformed expression or model file."""

    exit_code = 2

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class PreconditionError(JetError):
    exit_code = 3


class ContextMismatch(PreconditionError):
    pass


class TruncationError(PreconditionError):
    """An iterated total derivative would run past the jet order of the context."""


class SolverBoundsExhausted(JetError):
    exit_code = 4

    def __init__(self, message, bounds=None):
        super().__init__(message)
        self.bounds = bounds or {}


class VerificationError(JetError):
    exit_code = 5

    def __init__(self, message, flags=None):
        super().__init__(message)
        self.flags = flags or {}
