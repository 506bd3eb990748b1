"""Shared exception types."""


class AlgebraError(Exception):
    """Base class for all errors raised by this package."""


class VariableMismatchError(AlgebraError):
    """A polynomial uses variables the ring does not have."""


class RingMismatchError(AlgebraError):
    """Operands live over different rings."""


class RankMismatchError(AlgebraError):
    """Free-module elements with incompatible ambient ranks."""


class WellDefinednessError(AlgebraError):
    """A matrix does not send source relations into target relations."""


class LiftError(AlgebraError):
    """An element that should lie in a submodule failed to lift through it."""


class UngradedError(AlgebraError):
    """A graded-only operation was applied to an ungraded module."""


class GradingError(AlgebraError):
    """A supplied grading is not compatible with the relation columns."""


class TauNotWellDefinedError(AlgebraError):
    """Overlap data of a glued module is not a well-defined map."""


class TauNotInvertibleError(AlgebraError):
    """Overlap data of a glued module has no verified inverse."""


class StabilizationError(AlgebraError):
    """A chain that must stabilize for the requested operation did not."""


class WorkspaceError(AlgebraError):
    """Bad CLI workspace input: unresolved name, malformed data, bad flag."""
