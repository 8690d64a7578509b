"""Exception hierarchy.

Errors fall in three groups that the CLI maps onto exit statuses:
input/parse problems, unmet preconditions of a construction, and
internal invariant violations (including failed certificate replays).
"""


class CohsplitError(Exception):
    """Base class for every error raised by this package."""


class PreconditionError(CohsplitError, ValueError):
    """A documented precondition of an operation does not hold."""


class InvariantViolation(CohsplitError, AssertionError):
    """Something that must be impossible happened."""


class MalformedPartition(PreconditionError):
    pass


class UnassignedPoint(PreconditionError, KeyError):
    def __init__(self, point):
        super().__init__(point)
        self.point = point

    def __str__(self):
        return f"point {self.point!r} is outside the map's support"


class DuplicateElement(PreconditionError):
    pass


class EmptyElement(PreconditionError):
    pass


class EmptyInput(PreconditionError):
    pass


class NoWitness(PreconditionError):
    """No element of the available stream prefix meets a Hit goal."""

    def __init__(self, message, goal_index=None):
        super().__init__(message)
        self.goal_index = goal_index

    def __str__(self):
        msg = super().__str__()
        if self.goal_index is not None:
            return f"goal #{self.goal_index}: {msg}"
        return msg


class IncoherentResult(InvariantViolation):
    pass


class MissingTarget(PreconditionError):
    pass


class ConfigExhausted(PreconditionError):
    pass


class NotFaithfullyIndexed(PreconditionError):
    pass


class InconsistentFamily(PreconditionError):
    pass


class VerificationError(InvariantViolation):
    """A certificate failed replay. ``check`` names the failing check."""

    def __init__(self, check, detail=""):
        super().__init__(f"{check}: {detail}" if detail else check)
        self.check = check
        self.detail = detail
