"""Exception types shared across the package.

Errors that abort a search carry enough payload to diagnose the run:
budget errors report the requested and allowed work, precondition errors
carry the offending report, and engine contract errors carry the
extraction trace accumulated so far.
"""

from __future__ import annotations


class UniverseMismatchError(ValueError):
    """Two objects built over different universes were combined."""


class BudgetExceededError(RuntimeError):
    """A search or enumeration would exceed its configured budget."""

    def __init__(self, message: str, needed: int | None = None,
                 budget: int | None = None):
        super().__init__(message)
        self.needed = needed
        self.budget = budget


class TrialsExhaustedError(RuntimeError):
    """Randomized split search ran out of trials; carries the best split seen."""

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class GammaPreconditionError(ValueError):
    """An operation required a spreadness condition that does not hold."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class ContractViolationError(RuntimeError):
    """An engine guarantee failed to materialize; carries the partial trace."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace if trace is not None else []
