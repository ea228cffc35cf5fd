"""Single entry point dispatching to the checker for each criterion."""

from __future__ import annotations

from .history import History
from .polycheck import check_cc, check_ra, check_rc
from .reduce import check_pc, check_si
from .sercheck import check_ser
from .verdict import Criterion, Verdict


def check(
    h: History,
    criterion,
    budget: int | None = None,
    decompose: bool = False,
    via_sat: bool = False,
) -> Verdict:
    criterion = Criterion.parse(criterion)
    if decompose:
        from .commgraph import check_decomposed

        return check_decomposed(h, criterion, budget=budget)
    if via_sat:
        from .satenc import DEFAULT_CONFLICTS, check_via_sat

        return check_via_sat(h, criterion, budget or DEFAULT_CONFLICTS)
    if criterion is Criterion.RC:
        return check_rc(h)
    if criterion is Criterion.RA:
        return check_ra(h)
    if criterion is Criterion.CC:
        return check_cc(h)
    if criterion is Criterion.PC:
        return check_pc(h, budget)
    if criterion is Criterion.SI:
        return check_si(h, budget)
    return check_ser(h, budget)


def verdict_vector(h: History, **kw) -> dict[Criterion, bool]:
    """Boolean verdict for every criterion, strongest first."""
    return {c: check(h, c, **kw).valid for c in Criterion}
