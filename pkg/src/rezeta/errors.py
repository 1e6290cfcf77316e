"""Shared exception types."""


class RezetaError(Exception):
    """Common base so callers can catch any package-raised failure."""


class DomainError(RezetaError, ValueError):
    """Input outside an operation's stated domain."""


class PoleError(DomainError):
    """Evaluation at (or too close to) the pole of zeta at s = 1."""


class CapacityError(RezetaError, ValueError):
    """Input exceeds a configured capacity limit (not a mathematical restriction)."""


class PrecisionError(RezetaError, ValueError):
    """Requested tolerance is unachievable at the given working precision."""


class BracketError(RezetaError, ValueError):
    """Root finder was given endpoints without a sign change."""


class EvaluatorError(RezetaError, RuntimeError):
    """A user-supplied evaluator returned a non-finite or unusable value."""
