"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command line front end:
2 for input problems, 3 for degenerate or total conflict, 4 for resource caps.
"""


class NonspecificError(Exception):
    exit_code = 1

    def __init__(self, message: str = "", stage: str | None = None):
        super().__init__(message)
        self.stage = stage

    def __str__(self) -> str:
        base = super().__str__()
        return f"[{self.stage}] {base}" if self.stage else base


class InputError(NonspecificError, ValueError):
    """Malformed input: bad schema, bad masses, unknown labels."""

    exit_code = 2


class SchemaError(InputError):
    pass


class MassSumError(InputError):
    pass


class FrameMismatchError(InputError):
    pass


class InvalidPropositionError(InputError):
    pass


class UsageError(InputError):
    pass


class ConflictError(NonspecificError, ArithmeticError):
    exit_code = 3


class TotalConflictError(ConflictError):
    """Dempster's rule hit (numerically) total conflict."""


class DegenerateConflictError(ConflictError):
    """A meta-evidence formula would divide by zero."""


class NoMembershipError(ConflictError):
    """A piece of evidence is excluded from every subset."""


class InfeasibleAssignmentError(ConflictError):
    """More subsets than events: no one-to-one assignment exists."""


class ResourceLimitError(NonspecificError, RuntimeError):
    exit_code = 4


class RepartitionError(NonspecificError, RuntimeError):
    """Raised when partitioning is attempted on already discounted evidence."""

    exit_code = 2
