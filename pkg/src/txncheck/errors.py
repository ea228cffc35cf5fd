"""Exception hierarchy.

Input problems derive from :class:`InputError` (CLI exit code 2); search and
solver budget overruns derive from :class:`BudgetError` (exit code 3).
"""

from __future__ import annotations


class TxnCheckError(Exception):
    """Base class for every error raised by this package."""


class InputError(TxnCheckError):
    """The recorded history is unusable."""


class MalformedInput(InputError):
    pass


class DuplicateTid(InputError):
    pass


class CyclicSessionOrder(InputError):
    pass


class UnknownValue(InputError):
    """A read returns a value that no transaction wrote."""


class AmbiguousWrite(InputError):
    """Two transactions wrote the same value to the same variable."""


class WroSoCycle(InputError):
    """Session order and write-read relation together are cyclic."""


class InternalReadMismatch(InputError):
    """A read following a local write does not return that write's value."""


class HistoryTooLarge(InputError):
    pass


class RequiresSessionForm(InputError):
    pass


class UnknownName(InputError):
    pass


class BudgetError(TxnCheckError):
    pass


class SearchBudgetExceeded(BudgetError):
    def __init__(self, explored: int, budget: int):
        super().__init__(f"explored {explored} prefixes, budget is {budget}")
        self.explored = explored
        self.budget = budget


class BudgetExceeded(BudgetError):
    """The SAT solver ran out of its conflict budget."""


class InstanceTooLarge(TxnCheckError):
    pass


class NotTotalOrder(TxnCheckError):
    pass


class PreconditionViolated(TxnCheckError):
    pass
