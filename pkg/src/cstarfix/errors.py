"""Exception hierarchy shared by every module."""


class CStarError(Exception):
    """Base class for all errors raised by cstarfix."""


class AlgebraError(CStarError, ValueError):
    """Invalid algebra element or a violated algebraic precondition."""


class DomainError(CStarError, ValueError):
    """A point lies outside the configured point domain."""


class ScenarioError(CStarError, ValueError):
    """A mapping scenario violates one of its structural invariants."""


class ContractionError(ScenarioError):
    """A gauge violates the precondition of the requested certifier."""


class ExpressionError(CStarError, ValueError):
    """Expression parse or evaluation failure.

    ``position`` is the 0-based character offset of the offending token, or
    ``None`` for evaluation-time failures.
    """

    def __init__(self, message, position=None):
        super().__init__(message)
        self.message = message
        self.position = position


class UnknownEntryError(CStarError, KeyError):
    def __str__(self):
        return self.args[0] if self.args else ""
