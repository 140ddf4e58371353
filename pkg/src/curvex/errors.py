"""Exception hierarchy; the CLI maps each class to an exit code."""


class CurvexError(Exception):
    exit_code = 3


class ParseError(CurvexError, ValueError):
    """Malformed textual or JSON input."""

    exit_code = 2


class SemanticError(CurvexError, ValueError):
    """Well-formed input that violates a precondition."""

    exit_code = 3


class InsufficientDepth(CurvexError):
    """Finite prefix data cannot separate the objects at the requested depth."""

    exit_code = 4


class IndistinguishableAtDepth(InsufficientDepth):
    pass
