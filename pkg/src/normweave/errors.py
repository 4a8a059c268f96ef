"""Exception types shared across the package."""


class NormweaveError(Exception):
    """Base class for all library errors."""


class GuardExceeded(NormweaveError):
    """An exhaustive routine was asked for an instance above its size guard."""


class SearchBudgetExceeded(NormweaveError):
    """Backtracking search ran out of its node budget."""


class InputUnderrun(NormweaveError):
    """A transducer needed more input symbols than the source could supply."""


class HallViolation(NormweaveError):
    """A distribution graph unexpectedly failed to admit a perfect matching."""


class PetalCoverageError(NormweaveError):
    """The insertion traversal left petal edges untraversed (internal bug)."""
