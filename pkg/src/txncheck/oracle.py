"""Brute-force reference: search all commit orders extending so | wro.

The search places transactions one at a time.  After each placement the
axiom instances touching the new transaction are evaluated against the
partial order; an instance that is violated by a partial order stays
violated in every completion, so the branch is cut.  Failed states are
memoized on the placed set together with the instances whose conclusion is
already known to be false.  Those two pieces determine which completions can
still succeed, so the memo only prunes.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Sequence

from .axioms import INF, axiom_holds, compile_instances, violated
from .errors import InstanceTooLarge
from .history import History
from .verdict import Criterion

__all__ = ["axiom_holds", "brute_check", "brute_witness", "DEFAULT_MAX_TXNS"]

DEFAULT_MAX_TXNS = 10


def brute_witness(
    h: History, criterion, max_txns: int | None = DEFAULT_MAX_TXNS
) -> list[str] | None:
    """A commit order satisfying ``criterion``, or None if there is none."""
    criterion = Criterion.parse(criterion)
    n = len(h) - 1
    if max_txns is not None and n > max_txns:
        raise InstanceTooLarge(f"{n} transactions, oracle limit is {max_txns}")

    tids = sorted(h.tids)
    index = {t: i for i, t in enumerate(tids)}
    pred_mask = [0] * len(tids)
    for a, b in set(h.so_cover) | h.wro_pairs:
        pred_mask[index[b]] |= 1 << index[a]

    instances = compile_instances(h, criterion)
    touching = defaultdict(list)
    for k, inst in enumerate(instances):
        for t in inst.nodes:
            touching[t].append(k)
    # an instance stops mattering once all of its transactions are placed
    inst_mask = [sum(1 << index[t] for t in inst.nodes) for inst in instances]

    pos = dict.fromkeys(tids, INF)
    order: list[str] = []
    failed: set = set()
    full = (1 << len(tids)) - 1

    def open_false(placed: int) -> frozenset:
        out = []
        for k, inst in enumerate(instances):
            tr = inst.trig
            if inst_mask[k] & ~placed and pos[tr.t1] < pos[tr.t2] < INF:
                out.append(k)
        return frozenset(out)

    def search(placed: int) -> bool:
        if placed == full:
            return True
        key = (placed, open_false(placed))
        if key in failed:
            return False
        for i, t in enumerate(tids):
            bit = 1 << i
            if placed & bit or pred_mask[i] & ~placed:
                continue
            pos[t] = len(order)
            order.append(t)
            if not any(violated(instances[k], pos) for k in touching[t]):
                if search(placed | bit):
                    return True
            order.pop()
            pos[t] = INF
        failed.add(key)
        return False

    return list(order) if search(0) else None


def brute_check(h: History, criterion, max_txns: int | None = DEFAULT_MAX_TXNS) -> bool:
    """True iff some linear extension of so | wro satisfies ``criterion``.

    Raises :class:`InstanceTooLarge` above ``max_txns`` non-init transactions
    (pass None to lift the guard).
    """
    return brute_witness(h, criterion, max_txns) is not None
