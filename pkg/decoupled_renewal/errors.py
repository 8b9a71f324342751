"""
Exceptions raised by the numerical services. Everything derives from
RenewalError so that the CLI can tell our own failures apart from bugs.

Precondition failures also derive from ValueError, and numerical failures
from ArithmeticError, so that callers who do not know about this module
can still catch them sensibly.
"""
from typing import Optional, Tuple


class RenewalError(Exception):
    pass


class DomainError(RenewalError, ValueError):
    """An argument lies outside the domain of the operation."""


class RangeError(DomainError):
    """An argument would overflow the implementation's declared range."""


class HypothesisError(DomainError):
    """A theorem hypothesis required by the requested computation does not hold."""

    def __init__(self, condition: str, detail: Optional[str] = None):
        self.condition = condition
        message = f"hypothesis violated: {condition}"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)


class UnavailableError(RenewalError, NotImplementedError):
    """The step law does not carry the data needed (e.g. a cdf for a Laplace-only law)."""


class ConfigurationError(RenewalError):
    def __init__(self, field: str, detail: str):
        self.field = field
        super().__init__(f"invalid configuration for '{field}': {detail}")


class ConvergenceError(RenewalError, ArithmeticError):
    """An iterative or adaptive procedure did not reach its target."""

    def __init__(self, message: str, achieved: Optional[float] = None):
        self.achieved = achieved
        if achieved is not None:
            message = f"{message} (achieved {achieved:.3e})"
        super().__init__(message)


class BracketError(ConvergenceError):
    def __init__(self, target: float, achieved_range: Tuple[float, float]):
        self.target = target
        self.achieved_range = achieved_range
        super().__init__(
            f"could not bracket target {target!r}; "
            f"function values only spanned [{achieved_range[0]!r}, {achieved_range[1]!r}]"
        )


class LatticeTooCoarseError(ConvergenceError):
    def __init__(self, n: int, width: float, bound: float):
        self.n = n
        self.width = width
        super().__init__(
            f"lattice too coarse: enclosure width {width:.3e} at n={n} exceeds {bound:.3e}"
        )


class BudgetExceededError(RenewalError):
    """A study ran past its wall-clock budget; the rows finished so far were kept."""

    def __init__(self, budget_seconds: float, completed: int, total: int):
        self.budget_seconds = budget_seconds
        self.completed = completed
        self.total = total
        super().__init__(
            f"wall-clock budget of {budget_seconds:g}s exceeded after {completed} of {total} rows"
        )


class OutputError(RenewalError, OSError):
    def __init__(self, path: str, detail: str):
        self.path = path
        super().__init__(f"I/O failure on {path}: {detail}")


class WorkCancelledError(RenewalError):
    """The worker pool running this computation was cancelled, usually by a spent budget."""

    def __init__(self):
        super().__init__("computation cancelled")
