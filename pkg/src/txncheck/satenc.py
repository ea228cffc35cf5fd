"""CNF encoding of consistency checking and a small DPLL solver.

Two propositions exist per ordered pair of transactions: ``CAUSAL(a, b)``
over-approximates ``(wro | so)+`` and ``CO(a, b)`` is the commit order.
Criterion axioms become implications over those propositions; for RC and RA
the premise is decided on the history and only the conclusion is emitted.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field

from .axioms import (
    CONFLICT,
    PREFIX,
    SERIAL,
    STATIC,
    compile_instances,
    static_premise,
    triggers,
)
from .errors import BudgetExceeded, InstanceTooLarge
from .history import History
from .verdict import Criterion, Verdict

log = logging.getLogger(__name__)

CAUSAL = "CAUSAL"
CO = "CO"
AUX = "AUX"
DEFAULT_MAX_TXNS = 200
DEFAULT_CONFLICTS = 1_000_000


@dataclass
class CnfFormula:
    n_vars: int = 0
    clauses: list[list[int]] = field(default_factory=list)
    var_map: dict[tuple, int] = field(default_factory=dict)
    tids: tuple[str, ...] = ()

    def var(self, key: tuple) -> int:
        v = self.var_map.get(key)
        if v is None:
            self.n_vars += 1
            v = self.var_map[key] = self.n_vars
        return v

    def fresh(self) -> int:
        return self.var((AUX, self.n_vars + 1))

    def add(self, lits) -> None:
        """Add a clause; ``True`` literals satisfy it, ``False`` ones vanish."""
        out = []
        for lit in lits:
            if lit is True:
                return
            if lit is False:
                continue
            out.append(lit)
        if len(out) <= 3:
            self.clauses.append(out)
            return
        # split into 3-literal clauses chained by fresh variables
        a = self.fresh()
        self.clauses.append([out[0], out[1], a])
        for lit in out[2:-2]:
            b = self.fresh()
            self.clauses.append([-a, lit, b])
            a = b
        self.clauses.append([-a, out[-2], out[-1]])


def encode(h: History, criterion, max_txns: int = DEFAULT_MAX_TXNS) -> CnfFormula:
    criterion = Criterion.parse(criterion)
    tids = tuple(h.tids)
    if len(tids) > max_txns:
        raise InstanceTooLarge(f"{len(tids)} transactions, encoder limit is {max_txns}")
    f = CnfFormula(tids=tids)
    for tag in (CAUSAL, CO):
        for a in tids:
            for b in tids:
                if a != b:
                    f.var((tag, a, b))

    def lit(tag, a, b, positive=True):
        if a == b:
            # CO(a, a) and CAUSAL(a, a) are false
            return not positive
        v = f.var_map[(tag, a, b)]
        return v if positive else -v

    def causal(a, b, positive=True):
        return lit(CAUSAL, a, b, positive)

    def co(a, b, positive=True):
        return lit(CO, a, b, positive)

    for a, b in sorted(set(h.so) | h.wro_pairs):
        f.add([causal(a, b)])
    for i, a in enumerate(tids):
        for j, b in enumerate(tids):
            if a == b:
                continue
            f.add([causal(a, b, False), co(a, b)])
            if j > i:
                f.add([co(a, b), co(b, a)])
                f.add([co(a, b, False), co(b, a, False)])
            for c in tids:
                if c == a or c == b:
                    continue
                f.add([causal(a, b, False), causal(b, c, False), causal(a, c)])
                f.add([co(a, b, False), co(b, c, False), co(a, c)])

    if criterion in (Criterion.RC, Criterion.RA):
        for tr in triggers(h):
            if static_premise(h, tr, criterion):
                f.add([co(tr.t2, tr.t1)])
        return f
    if criterion is Criterion.CC:
        for tr in triggers(h):
            f.add([causal(tr.t2, tr.t3, False), co(tr.t2, tr.t1)])
        return f
    for inst in compile_instances(h, criterion):
        tr = inst.trig
        concl = co(tr.t2, tr.t1)
        if inst.kind == STATIC:
            f.add([concl])
        elif inst.kind == SERIAL:
            f.add([co(tr.t2, tr.t3, False), concl])
        elif inst.kind == PREFIX:
            for t4 in sorted(inst.others):
                if t4 == tr.t1:
                    continue
                f.add([co(tr.t2, t4, False), concl])
        elif inst.kind == CONFLICT:
            for t4 in sorted(inst.others):
                if t4 == tr.t1:
                    continue
                if t4 == tr.t2:
                    f.add([co(tr.t2, tr.t3, False), concl])
                else:
                    f.add([co(tr.t2, t4, False), co(t4, tr.t3, False), concl])
    log.debug("encoded %s: %d vars, %d clauses", criterion, f.n_vars, len(f.clauses))
    return f


def emit_dimacs(f: CnfFormula) -> str:
    lines = []
    for key, v in sorted(f.var_map.items(), key=lambda kv: kv[1]):
        if key[0] != AUX:
            lines.append(f"c {v} {key[0]} {key[1]} {key[2]}")
    lines.append(f"p cnf {f.n_vars} {len(f.clauses)}")
    lines.extend(" ".join(map(str, c + [0])) for c in f.clauses)
    return "\n".join(lines) + "\n"


@dataclass
class SolveResult:
    sat: bool
    model: dict[int, bool] | None = None
    conflicts: int = 0

    def __bool__(self) -> bool:
        return self.sat


def solve(f: CnfFormula, budget: int = DEFAULT_CONFLICTS) -> SolveResult:
    """DPLL with two watched literals and chronological backtracking."""
    n = f.n_vars
    val = [0] * (n + 1)
    clauses: list[list[int]] = []
    units: list[int] = []
    for c in f.clauses:
        c = list(dict.fromkeys(c))
        if any(-l in c for l in c):
            continue
        if not c:
            return SolveResult(False)
        if len(c) == 1:
            units.append(c[0])
        else:
            clauses.append(c)
    watches: dict[int, list[int]] = defaultdict(list)
    for i, c in enumerate(clauses):
        watches[c[0]].append(i)
        watches[c[1]].append(i)

    trail: list[int] = []

    def value(l: int) -> int:
        v = val[l if l > 0 else -l]
        return v if l > 0 else -v

    def enqueue(l: int) -> None:
        val[l if l > 0 else -l] = 1 if l > 0 else -1
        trail.append(l)

    def propagate(qhead: int) -> bool:
        """Unit propagation from trail[qhead:]; False on conflict."""
        while qhead < len(trail):
            false_lit = -trail[qhead]
            qhead += 1
            wl = watches[false_lit]
            i = 0
            while i < len(wl):
                c = clauses[wl[i]]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                if value(c[0]) == 1:
                    i += 1
                    continue
                for k in range(2, len(c)):
                    if value(c[k]) != -1:
                        c[1], c[k] = c[k], c[1]
                        watches[c[1]].append(wl[i])
                        wl[i] = wl[-1]
                        wl.pop()
                        break
                else:
                    v0 = value(c[0])
                    if v0 == -1:
                        return False
                    if v0 == 0:
                        enqueue(c[0])
                    i += 1
        return True

    def undo(idx: int) -> None:
        for l in trail[idx:]:
            val[abs(l)] = 0
        del trail[idx:]

    for u in units:
        v = value(u)
        if v == -1:
            return SolveResult(False)
        if v == 0:
            enqueue(u)
    ok = propagate(0)
    decisions: list[tuple[int, int, bool]] = []  # (trail index, literal, flipped)
    conflicts = 0
    while True:
        if not ok:
            conflicts += 1
            if conflicts > budget:
                raise BudgetExceeded(f"more than {budget} conflicts")
            while decisions and decisions[-1][2]:
                decisions.pop()
            if not decisions:
                return SolveResult(False, conflicts=conflicts)
            idx, lit, _ = decisions.pop()
            undo(idx)
            decisions.append((idx, -lit, True))
            enqueue(-lit)
            ok = propagate(idx)
            continue
        var = next((v for v in range(1, n + 1) if val[v] == 0), None)
        if var is None:
            model = {v: val[v] == 1 for v in range(1, n + 1)}
            return SolveResult(True, model, conflicts)
        decisions.append((len(trail), -var, False))
        enqueue(-var)
        ok = propagate(len(trail) - 1)


def decode(f: CnfFormula, model: dict[int, bool]) -> list[str]:
    """Commit order from a model: sort by number of CO predecessors."""
    preds = {t: 0 for t in f.tids}
    for (tag, *rest), v in f.var_map.items():
        if tag == CO and model[v]:
            preds[rest[1]] += 1
    return sorted(f.tids, key=lambda t: preds[t])


def check_via_sat(h: History, criterion, budget: int = DEFAULT_CONFLICTS) -> Verdict:
    criterion = Criterion.parse(criterion)
    f = encode(h, criterion)
    res = solve(f, budget)
    if res.sat:
        return Verdict.ok(criterion, decode(f, res.model), details={"conflicts": res.conflicts})
    return Verdict.violation(
        criterion, {"unsat_clauses": len(f.clauses)}, details={"conflicts": res.conflicts}
    )
