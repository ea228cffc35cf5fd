"""Reductions of Prefix Consistency and Snapshot Isolation to Serializability.

Each transaction ``t`` is split into a read part ``R_t`` holding its reads and
a write part ``W_t`` holding its writes, with ``R_t`` session-ordered before
``W_t``.  The original history is PC iff the split history is serializable.
For SI, every pair of transactions writing a common variable additionally
exchanges two auxiliary variables, which forbids serial orders where one
pair member commits between the read and write parts of the other.

The init transaction has no reads, so its read part would be empty and
so-minimal; it is folded into the init transaction of the split history.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .axioms import verify_witness
from .history import INIT, History, Operation, Transaction, read, write
from .sercheck import check_ser
from .verdict import Criterion, Verdict

R_SUFFIX = "#R"
W_SUFFIX = "#W"
AUX_PREFIX = "⊥si:"
AUX_READ_VALUE = 1
AUX_WRITE_VALUE = 2


@dataclass
class SplitMap:
    parts: dict[str, tuple[str, str]] = field(default_factory=dict)
    # (t1, t2) -> auxiliary variable written by R_t1 and W_t2, read by W_t1
    aux: dict[tuple[str, str], str] = field(default_factory=dict)

    @property
    def origin(self) -> dict[str, tuple[str, str]]:
        """split tid -> (original tid, 'R' | 'W')"""
        out = {}
        for t, (rt, wt) in self.parts.items():
            out[rt] = (t, "R")
            out[wt] = (t, "W")
        out[INIT] = (INIT, "W")
        return out

    def commit_order(self, split_order: list[str]) -> list[str]:
        """Original transactions ordered by the position of their write parts."""
        origin = self.origin
        return [origin[s][0] for s in split_order if origin[s][1] == "W"]


def _aux_prefix(h: History) -> str:
    prefix = AUX_PREFIX
    while any(x.startswith(prefix) for x in h.variables):
        prefix = "⊥" + prefix
    return prefix


def _split(h: History, extra_r=None, extra_w=None):
    extra_r = extra_r or {}
    extra_w = extra_w or {}
    split = SplitMap()
    txns: list[Transaction] = []
    for t in h.tids:
        if t == INIT:
            continue
        rt, wt = t + R_SUFFIX, t + W_SUFFIX
        split.parts[t] = (rt, wt)
        txns.append(Transaction.make(rt, list(h[t].reads) + extra_r.get(t, [])))
        txns.append(Transaction.make(wt, list(h[t].writes) + extra_w.get(t, [])))
    if h.is_session_form:
        sessions = [[p for t in s for p in split.parts[t]] for s in h.sessions]
        return History.build(txns, sessions=sessions), split
    edges = [split.parts[t] for t in split.parts]
    for a, b in h.so_edges:
        edges.append((split.parts[a][1], split.parts[b][0]))
    return History.build(txns, so_edges=edges), split


def reduce_pc_to_ser(h: History) -> tuple[History, SplitMap]:
    return _split(h)


def conflict_pairs(h: History) -> list[tuple[str, str]]:
    """Unordered pairs of non-init transactions writing a common variable."""
    tids = sorted(t for t in h.tids if t != INIT)
    out = []
    for i, a in enumerate(tids):
        wa = h[a].write_vars
        if not wa:
            continue
        for b in tids[i + 1:]:
            if wa & h[b].write_vars:
                out.append((a, b))
    return out


def reduce_si_to_ser(h: History) -> tuple[History, SplitMap]:
    prefix = _aux_prefix(h)
    extra_r: dict[str, list[Operation]] = {}
    aux_reads: dict[str, list[Operation]] = {}
    aux_writes: dict[str, list[Operation]] = {}
    aux = {}
    for a, b in conflict_pairs(h):
        for t1, t2 in ((a, b), (b, a)):
            x = f"{prefix}{t1}:{t2}"
            aux[(t1, t2)] = x
            extra_r.setdefault(t1, []).append(write(x, AUX_READ_VALUE))
            aux_writes.setdefault(t2, []).append(write(x, AUX_WRITE_VALUE))
            aux_reads.setdefault(t1, []).append(read(x, AUX_READ_VALUE))
    extra_w = {
        t: aux_reads.get(t, []) + aux_writes.get(t, [])
        for t in set(aux_reads) | set(aux_writes)
    }
    hs, split = _split(h, extra_r, extra_w)
    split.aux = aux
    return hs, split


def _check_via_ser(h: History, criterion: Criterion, reduced, budget) -> Verdict:
    hs, split = reduced
    v = check_ser(hs, budget=budget)
    if v.valid:
        witness = split.commit_order(v.witness)
        assert verify_witness(h, witness, criterion), "mapped witness rejected"
        return Verdict.ok(criterion, witness, explored_states=v.explored_states)
    origin = split.origin
    deepest = [f"{origin[s][0]}:{origin[s][1]}" for s in v.evidence["deepest_prefix"]]
    return Verdict.violation(
        criterion, {"deepest_prefix": deepest}, explored_states=v.explored_states
    )


def check_pc(h: History, budget: int | None = None) -> Verdict:
    return _check_via_ser(h, Criterion.PC, reduce_pc_to_ser(h), budget)


def check_si(h: History, budget: int | None = None) -> Verdict:
    return _check_via_ser(h, Criterion.SI, reduce_si_to_ser(h), budget)
