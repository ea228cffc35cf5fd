"""Consistency checking for transactional histories."""

from .checkers import check, verdict_vector
from .errors import (
    BudgetError,
    InputError,
    SearchBudgetExceeded,
    TxnCheckError,
)
from .history import (
    History,
    Operation,
    Transaction,
    load_history,
    parse_history,
    serialize,
    width,
)
from .verdict import ALL_CRITERIA, Criterion, Verdict

__all__ = [
    "ALL_CRITERIA",
    "BudgetError",
    "Criterion",
    "History",
    "InputError",
    "Operation",
    "SearchBudgetExceeded",
    "Transaction",
    "TxnCheckError",
    "Verdict",
    "check",
    "load_history",
    "parse_history",
    "serialize",
    "verdict_vector",
    "width",
]
