"""Exception hierarchy shared by all gridnav modules."""


class GridNavError(Exception):
    """Base class for every error raised by gridnav."""


class ParseError(GridNavError, ValueError):
    """Malformed input text. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class RaggedRows(ParseError):
    pass


class InvalidChar(ParseError):
    pass


class EmptyMap(ParseError):
    pass


class ValidationError(GridNavError, ValueError):
    """A parsed value violates a domain invariant."""


class InvalidScenario(ValidationError):
    pass


class OutOfBounds(GridNavError, IndexError):
    pass


class BlockedEndpoint(GridNavError):
    pass


class NonAdjacentStep(GridNavError, ValueError):
    pass


class DisconnectedKeyPoint(GridNavError):
    """Some key point cannot be reached from the tour start."""

    def __init__(self, message, cell=None):
        self.cell = cell
        super().__init__(message)


class InfeasibleLeg(GridNavError):
    pass


class TooManyKeyPoints(GridNavError, ValueError):
    pass


class NegativeTime(GridNavError, ValueError):
    pass


class NegativeDistance(GridNavError, ValueError):
    pass


class BlockedAhead(GridNavError):
    pass


class TurnTimeout(GridNavError):
    pass


class MissingBearing(GridNavError, KeyError):
    pass


class InconsistentTrace(GridNavError, ValueError):
    pass


class TickBudgetExceeded(GridNavError):
    pass
