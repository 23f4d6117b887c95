"""Exception hierarchy shared by every limcyc module."""


class LimcycError(Exception):
    """Base class for all errors raised by limcyc."""


class ParseError(LimcycError, ValueError):
    """Syntax error in a phi expression.

    Attributes
    ----------
    position : int
        Character offset in the source where the error was detected.
    expected : tuple of str
        Token kinds the parser would have accepted at ``position``.
    """

    def __init__(self, message, position=0, expected=()):
        self.position = position
        self.expected = tuple(expected)
        detail = f"{message} at position {position}"
        if self.expected:
            detail += f" (expected {', '.join(self.expected)})"
        super().__init__(detail)


class UnboundIdentifierError(ParseError):
    """An identifier other than x or y has no value in ``params``."""


class NonPolynomialError(ParseError):
    """Division, negative or fractional exponents."""


class PreconditionError(LimcycError, ValueError):
    """An operation was called outside its documented domain."""


class IntegrationError(LimcycError):
    """Integration stopped before reaching its target.

    The last accepted state is kept in ``state`` as ``(t, ndarray)``.
    """

    def __init__(self, message, state=None):
        self.state = state
        super().__init__(message)


class StepSizeUnderflow(IntegrationError):
    pass


class NonFiniteState(IntegrationError):
    pass


class NoCrossingError(IntegrationError):
    """No section crossing within the time budget."""


class HitOriginError(IntegrationError):
    """The trajectory collapsed onto the equilibrium."""


class EscapedError(IntegrationError):
    """The trajectory left every bounded region we are willing to follow."""


class NoBracketError(LimcycError):
    """The return-map residual never changed sign over the search range."""


class CycleNotConverged(LimcycError):
    pass


class NoEntryError(LimcycError):
    """A trajectory did not enter the trapping disk within ``t_max``."""
