"""Exception hierarchy shared by every module of the engine."""


class StarfluxError(Exception):
    """Base class for all engine errors."""


class ConfigurationError(StarfluxError):
    """Incompatible parameters, e.g. mismatched truncation orders or dimensions."""


class DomainError(StarfluxError, ValueError):
    """An operation was called outside its mathematical domain."""


class RepresentationError(StarfluxError):
    """A value left the exact representation it is required to live in."""


class UnsupportedPathError(StarfluxError):
    """A generator or path cannot be integrated exactly by the engine."""


class ConvergenceError(StarfluxError):
    """A degree-graded recursion failed to stabilise (a grading bug, not math)."""
