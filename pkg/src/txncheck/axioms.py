"""Axiom instances shared by the oracle, witness verification, the saturation
checkers and the SAT encoder.

Every axiom has the shape

    (t1, t3) in wro_x  and  t2 writes x  and  t1 != t2  and  premise
        implies  (t2, t1) in co

and only the premise differs between criteria.  For RC, RA and CC the premise
mentions so and wro only, so it is decided once per instance.  For PC, SI and
SER the premise refers to co and is evaluated against a (possibly partial)
assignment of positions to transactions.  Unplaced transactions sit at
position ``INF``; ``co(a, b)`` is then read as ``pos[a] < pos[b]``, which is
true exactly when it holds in every completion of the partial order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import NotTotalOrder
from .history import History
from .verdict import Criterion

INF = math.inf

STATIC = "static"
PREFIX = "prefix"
CONFLICT = "conflict"
SERIAL = "serial"


@dataclass(frozen=True)
class Trigger:
    x: str
    t1: str
    t2: str
    t3: str


@dataclass(frozen=True)
class Instance:
    kind: str
    trig: Trigger
    # predecessors of t3 in wro | so (PREFIX) or writers sharing a variable
    # with t3 (CONFLICT)
    others: frozenset = frozenset()

    @property
    def nodes(self) -> frozenset:
        t = self.trig
        return frozenset((t.t1, t.t2, t.t3)) | self.others


def triggers(h: History) -> list[Trigger]:
    """All ``(x, t1, t2, t3)`` with ``(t1, t3) in wro_x``, ``t2`` writing x, t1 != t2."""
    out = []
    for x in sorted(h.wro_x):
        for t1, t3 in sorted(h.wro_x[x]):
            for t2 in h.writers.get(x, ()):
                if t2 != t1:
                    out.append(Trigger(x, t1, t2, t3))
    return out


def rc_premise(h: History, tr: Trigger) -> bool:
    """Some read of x in t3 from t1 is po-preceded by a read from t2."""
    ops = h[tr.t3].ops
    seen_t2 = False
    for op in ops:
        if not op.is_read:
            continue
        src = h.wro[(tr.t3, op.op_id)]
        if op.var == tr.x and src == tr.t1 and seen_t2:
            return True
        if src == tr.t2:
            seen_t2 = True
    return False


def static_premise(h: History, tr: Trigger, criterion: Criterion) -> bool:
    if criterion is Criterion.RC:
        return rc_premise(h, tr)
    if criterion is Criterion.RA:
        return (tr.t2, tr.t3) in h.wro_pairs or (tr.t2, tr.t3) in h.so
    if criterion is Criterion.CC:
        return (tr.t2, tr.t3) in h.causal
    raise ValueError(f"{criterion} has no static premise")


def causal_pred(h: History, t: str) -> frozenset:
    """Direct predecessors of ``t`` in wro | so (so is already transitive)."""
    return h.so_pred[t] | h.wro_pred[t]


def compile_instances(h: History, criterion: Criterion) -> list[Instance]:
    criterion = Criterion.parse(criterion)
    out: list[Instance] = []
    if criterion in (Criterion.RC, Criterion.RA, Criterion.CC):
        for tr in triggers(h):
            if static_premise(h, tr, criterion):
                out.append(Instance(STATIC, tr))
        return out
    if criterion is Criterion.SER:
        return [Instance(SERIAL, tr) for tr in triggers(h)]
    conflict_peers: dict[str, frozenset] = {}
    for tr in triggers(h):
        pred = causal_pred(h, tr.t3)
        if tr.t2 in pred:
            out.append(Instance(STATIC, tr))
        elif pred:
            out.append(Instance(PREFIX, tr, pred))
        if criterion is Criterion.SI:
            if tr.t3 not in conflict_peers:
                wv = h[tr.t3].write_vars
                conflict_peers[tr.t3] = frozenset(
                    t for t in h.tids if t != tr.t3 and wv & h[t].write_vars
                )
            peers = conflict_peers[tr.t3]
            if peers:
                out.append(Instance(CONFLICT, tr, peers))
    return out


def premise_holds(inst: Instance, pos: Mapping[str, float]) -> bool:
    tr = inst.trig
    if inst.kind == STATIC:
        return True
    if inst.kind == SERIAL:
        return pos[tr.t2] < pos[tr.t3]
    p2 = pos[tr.t2]
    if inst.kind == PREFIX:
        return any(p2 < pos[t4] for t4 in inst.others)
    p3 = pos[tr.t3]
    for t4 in inst.others:
        p4 = pos[t4]
        if (t4 == tr.t2 or p2 < p4) and p4 < p3:
            return True
    return False


def violated(inst: Instance, pos: Mapping[str, float]) -> bool:
    """True iff the instance is violated by every completion of ``pos``."""
    tr = inst.trig
    return pos[tr.t1] < pos[tr.t2] and premise_holds(inst, pos)


def instance_json(criterion: Criterion, inst: Instance) -> dict:
    tr = inst.trig
    return {
        "criterion": criterion.value,
        "axiom": inst.kind,
        "x": tr.x,
        "t1": tr.t1,
        "t2": tr.t2,
        "t3": tr.t3,
    }


def positions(h: History, co: Sequence[str]) -> dict[str, int]:
    co = list(co)
    if len(co) != len(h.tids) or set(co) != set(h.tids):
        raise NotTotalOrder("commit order must list every transaction exactly once")
    return {t: i for i, t in enumerate(co)}


def first_violation(h: History, co: Sequence[str], criterion) -> Instance | None:
    criterion = Criterion.parse(criterion)
    pos = positions(h, co)
    for inst in compile_instances(h, criterion):
        if violated(inst, pos):
            return inst
    return None


def axiom_holds(h: History, co: Sequence[str], criterion) -> bool:
    """Evaluate the criterion's axioms on the total order ``co``."""
    return first_violation(h, co, criterion) is None


def extends_so_wro(h: History, co: Sequence[str]) -> bool:
    pos = positions(h, co)
    return all(pos[a] < pos[b] for a, b in h.so) and all(
        pos[a] < pos[b] for a, b in h.wro_pairs
    )


def verify_witness(h: History, co: Sequence[str], criterion) -> bool:
    """``co`` extends so | wro and satisfies the criterion's axioms."""
    return extends_so_wro(h, co) and axiom_holds(h, co, criterion)
