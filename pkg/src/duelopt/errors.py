"""Semantic exceptions shared across the package.

Plain ``ValueError`` is used for ordinary argument/domain violations;
the classes below exist where callers need structured payloads.
"""


class DueloptError(Exception):
    """Base class for package-specific failures."""


class FitError(DueloptError):
    """Coefficient fit could not reach the requested tolerance.

    Carries the best residual achieved and the term count tried.
    """

    def __init__(self, message: str, best_residual: float, max_terms: int):
        super().__init__(message)
        self.best_residual = best_residual
        self.max_terms = max_terms


class ValidityError(DueloptError):
    """A truncation schedule violates its second-moment validity condition.

    Running the estimator past this guard would give unbounded variance.
    """


class BudgetError(DueloptError):
    """Requested iteration budget does not fit in a 64-bit integer.

    ``real_budget`` holds the real-valued budget that overflowed.
    """

    def __init__(self, message: str, real_budget: float):
        super().__init__(message)
        self.real_budget = real_budget


class RunDivergedError(DueloptError):
    """An optimization run produced a non-finite iterate or gap.

    ``last_iterate`` is the last finite point, ``step`` the iteration index.
    """

    def __init__(self, message: str, last_iterate, step: int):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.step = step


class ConfigError(DueloptError):
    """Invalid or unknown experiment configuration (CLI exit code 2)."""
