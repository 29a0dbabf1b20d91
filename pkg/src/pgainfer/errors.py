"""Exception hierarchy shared by the parser, the automata layer and the CLI."""


class PgaError(Exception):
    """Base class for every error raised by this package."""


class ProgramSyntaxError(PgaError):
    """Malformed program text.

    Carries the 1-based source position and the set of tokens the parser
    would have accepted there.
    """

    def __init__(self, message, line, column, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(sorted(set(expected)))
        detail = f"{line}:{column}: {message}"
        if self.expected:
            detail += " (expected one of: " + ", ".join(self.expected) + ")"
        super().__init__(detail)


class SemanticError(PgaError):
    """Well-formed program text with an invalid value, e.g. a probability above 1."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{line}:{column}: {message}"
        super().__init__(message)


class GuardError(PgaError, ValueError):
    """A guard that is not rectangular (variable compared to a natural constant)."""


class DivergentAutomaton(PgaError):
    """The scalar part of an automaton has cycles of weight >= 1, so its star diverges."""


class ZeroMassError(PgaError):
    """Observations rejected all probability mass; the posterior is undefined."""
