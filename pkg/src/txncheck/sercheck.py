"""Serializability by depth-first search over so-prefixes.

A prefix is an so-downward-closed set of transactions.  The search grows a
prefix one transaction at a time, only through valid extensions, and
remembers prefixes from which the full history cannot be reached.  For a
history with sessions the prefix is a vector of per-session counts, so the
number of distinct states is at most ``(L + 1) ** width`` where ``L`` is the
longest session.
"""

from __future__ import annotations

import logging
import os
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable

from .axioms import verify_witness
from .errors import SearchBudgetExceeded
from .history import INIT, History
from .verdict import Criterion, Verdict

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10_000_000
BUDGET_ENV = "TXNCHECK_BUDGET"


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw:
        try:
            return int(raw)
        except ValueError:
            log.warning("ignoring non-integer %s=%r", BUDGET_ENV, raw)
    return DEFAULT_BUDGET


@dataclass(frozen=True)
class PrefixState:
    tids: frozenset
    linearization: tuple = ()
    counts: tuple | None = None


def is_valid_extension(h: History, prefix: "PrefixState | Iterable[str]", t: str) -> bool:
    """Can ``t`` be appended to the serial prefix ``prefix``?

    (a) everything ``t`` reads from is already in the prefix, and (b) for
    each variable ``t`` writes, nobody outside the prefix (other than ``t``)
    reads that variable from inside the prefix.
    """
    inside = prefix.tids if isinstance(prefix, PrefixState) else frozenset(prefix)
    if not h.wro_pred[t] <= inside:
        return False
    for x in h[t].write_vars:
        for w, r in h.wro_x.get(x, ()):
            if w in inside and r not in inside and r != t:
                return False
    return True


class _Search:
    def __init__(self, h: History, budget: int, memo: bool):
        self.h = h
        self.budget = budget
        self.memo = memo
        tids = list(h.tids)
        self.tids = tids
        idx = {t: i for i, t in enumerate(tids)}
        n = len(tids)
        var_idx = {x: i for i, x in enumerate(h.variables)}

        preds = [set() for _ in range(n)]
        for a, b in set(h.so_cover) | h.wro_pairs:
            preds[idx[b]].add(idx[a])
        self.missing = [len(p) for p in preds]
        self.succs = [[] for _ in range(n)]
        for b, ps in enumerate(preds):
            for a in ps:
                self.succs[a].append(b)

        self.own_reads = [defaultdict(int) for _ in range(n)]
        self.readers = [defaultdict(int) for _ in range(n)]
        for (r, op_id), w in h.wro.items():
            x = var_idx[h[r].ops[op_id].var]
            self.own_reads[idx[r]][x] += 1
            self.readers[idx[w]][x] += 1
        self.own_reads = [list(d.items()) for d in self.own_reads]
        self.readers = [list(d.items()) for d in self.readers]
        self.writes = [[var_idx[x] for x in sorted(h[t].write_vars)] for t in tids]
        self.pending = [0] * len(var_idx)
        self.placed = [False] * n

        if h.is_session_form:
            self.sessions = [[idx[t] for t in s] for s in h.sessions]
            self.counts = [0] * len(self.sessions)
        else:
            self.sessions = None
            # candidates in ascending tid order
            self.order = sorted(range(n), key=lambda i: tids[i])
        self.key_bits = 0
        self.explored = 0
        self.seen: set = set()
        self.linear: list[int] = []
        self.deepest: list[int] = []

    def valid_ext(self, i: int) -> bool:
        if self.missing[i]:
            return False
        own = dict(self.own_reads[i])
        pending = self.pending
        for x in self.writes[i]:
            if pending[x] - own.get(x, 0):
                return False
        return True

    def add(self, i: int, session: int | None) -> None:
        self.placed[i] = True
        self.linear.append(i)
        for x, c in self.own_reads[i]:
            self.pending[x] -= c
        for x, c in self.readers[i]:
            self.pending[x] += c
        for j in self.succs[i]:
            self.missing[j] -= 1
        if session is not None:
            self.counts[session] += 1
        self.key_bits |= 1 << i

    def remove(self, i: int, session: int | None) -> None:
        self.placed[i] = False
        self.linear.pop()
        for x, c in self.own_reads[i]:
            self.pending[x] += c
        for x, c in self.readers[i]:
            self.pending[x] -= c
        for j in self.succs[i]:
            self.missing[j] += 1
        if session is not None:
            self.counts[session] -= 1
        self.key_bits &= ~(1 << i)

    def key(self):
        return tuple(self.counts) if self.sessions is not None else self.key_bits

    def candidates(self) -> list[tuple[int, int | None]]:
        out = []
        if self.sessions is not None:
            for s, sess in enumerate(self.sessions):
                c = self.counts[s]
                if c < len(sess) and self.valid_ext(sess[c]):
                    out.append((sess[c], s))
        else:
            for i in self.order:
                if not self.placed[i] and self.valid_ext(i):
                    out.append((i, None))
        return out

    def visit(self) -> bool:
        """Count a newly reached state; False if it is known to fail."""
        if self.memo:
            k = self.key()
            if k in self.seen:
                return False
        self.explored += 1
        if self.explored > self.budget:
            raise SearchBudgetExceeded(self.explored, self.budget)
        if len(self.linear) > len(self.deepest):
            self.deepest = list(self.linear)
        return True

    def run(self) -> bool:
        n = len(self.tids)
        init = self.tids.index(INIT)
        self.add(init, None)
        self.visit()
        stack = [(self.candidates(), 0)]
        while stack:
            if len(self.linear) == n:
                return True
            cands, pos = stack[-1]
            if pos < len(cands):
                stack[-1] = (cands, pos + 1)
                i, s = cands[pos]
                self.add(i, s)
                if self.visit():
                    stack.append((self.candidates(), 0))
                else:
                    self.remove(i, s)
                continue
            # every extension of this prefix failed
            stack.pop()
            if self.memo:
                self.seen.add(self.key())
            if stack:
                last = self.linear[-1]
                self.remove(last, self._session_of(last))
        return False

    def _session_of(self, i: int) -> int | None:
        if self.sessions is None:
            return None
        return self.h.session_of[self.tids[i]][0]


def check_ser(
    h: History, budget: int | None = None, memo: bool = True, verify: bool = True
) -> Verdict:
    """Decide serializability.  Valid verdicts carry the serial order found."""
    budget = default_budget() if budget is None else budget
    search = _Search(h, budget, memo)
    found = search.run()
    names = search.tids
    if found:
        witness = [names[i] for i in search.linear]
        if verify:
            assert verify_witness(h, witness, Criterion.SER), "bad serial witness"
        return Verdict.ok(Criterion.SER, witness, explored_states=search.explored)
    deepest = [names[i] for i in search.deepest]
    return Verdict.violation(
        Criterion.SER,
        {"deepest_prefix": deepest},
        explored_states=search.explored,
    )


def state_bound(h: History) -> int | None:
    """``(L + 1) ** width`` for histories with sessions, else None."""
    if not h.is_session_form:
        return None
    sessions = [s for s in h.sessions if s]
    if not sessions:
        return 1
    longest = max(len(s) for s in sessions)
    return (longest + 1) ** len(sessions)


__all__ = [
    "DEFAULT_BUDGET",
    "PrefixState",
    "check_ser",
    "default_budget",
    "is_valid_extension",
    "state_bound",
    "verify_witness",
]
