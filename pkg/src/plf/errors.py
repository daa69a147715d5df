"""Exception types shared across the package."""


class FrameworkError(Exception):
    """Base class for every error this package raises deliberately."""


class UnknownKindError(FrameworkError):
    pass


class NoParseError(FrameworkError):
    """The token sequence is not in the language of the requested kind."""


class AmbiguousParseError(FrameworkError):
    """More than one parse tree exists; the grammar is ambiguous on this input."""


class UndeclaredVariableError(FrameworkError):
    pass


class DuplicateIdError(FrameworkError):
    pass


class KindMismatchError(FrameworkError):
    """A substitution binding violates kind conformity."""


class SystemSyntaxError(FrameworkError):
    """Malformed system definition text."""


class ProofSyntaxError(FrameworkError):
    """Malformed proof file text."""


class UnknownAssertionError(FrameworkError):
    pass


class UnknownStatementError(FrameworkError):
    pass


class GoalNotDerivedError(FrameworkError):
    pass


class UniverseOverflowError(FrameworkError):
    """The bounded expression universe exceeded its hard cap."""
