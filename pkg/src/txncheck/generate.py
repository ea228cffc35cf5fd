"""Test-history generators: random workloads, the figure catalogue and the
history built from a CNF formula for the NP-hardness construction."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .errors import MalformedInput, UnknownName
from .history import History, Operation, Transaction, read, write

SERIAL = "serial"
STALE = "stale_read"
SNAPSHOT = "snapshot"


@dataclass(frozen=True)
class GenParams:
    sessions: int = 3
    txns_per_session: int = 2
    ops_per_txn: int = 3
    vars: int = 3
    seed: int = 0
    disjoint_writes: bool = False
    mode: str = SERIAL
    stale_reads: int = 0
    # GeneralForm output: a random forward DAG over the serial order
    general: bool = False
    edge_prob: float = 0.3

    def __post_init__(self):
        if min(self.sessions, self.txns_per_session, self.ops_per_txn, self.vars) < 1:
            raise ValueError("generator counts must be at least 1")
        if self.mode not in (SERIAL, STALE, SNAPSHOT):
            raise ValueError(f"unknown mode {self.mode!r}")


def _var_name(i: int) -> str:
    return f"x{i}"


def gen_random(p: GenParams) -> History:
    """Run random transactions serially, then optionally make some reads stale.

    Serial mode yields a serializable history.  ``stale_read`` mode redirects
    ``p.stale_reads`` external reads to an older committed version of the same
    variable.  ``snapshot`` mode lets each transaction read from a random
    prefix of the commit sequence that still contains its own session's
    earlier transactions, which produces the lost-update and write-skew
    shapes but never a long fork.
    """
    rng = random.Random(p.seed)
    variables = [_var_name(i) for i in range(p.vars)]
    owned = {s: [x for i, x in enumerate(variables) if i % p.sessions == s]
             for s in range(p.sessions)}

    slots = [s for s in range(p.sessions) for _ in range(p.txns_per_session)]
    rng.shuffle(slots)
    next_idx = [0] * p.sessions

    counter = dict.fromkeys(variables, 0)
    # committed values per variable, oldest first
    versions: dict[str, list[int]] = {x: [0] for x in variables}
    # commit index of each committed value, parallel to ``versions``
    committed_at: dict[str, list[int]] = {x: [-1] for x in variables}
    last_commit = [-1] * p.sessions
    serial: list[str] = []
    ops_of: dict[str, list[Operation]] = {}
    session_of: dict[str, int] = {}
    # (tid, op position, var, number of versions visible when read)
    external_reads: list[tuple[str, int, str, int]] = []

    for s in slots:
        j = next_idx[s]
        next_idx[s] += 1
        tid = f"s{s + 1}_{j + 1}" if not p.general else f"t{len(serial) + 1}"
        local: dict[str, int] = {}
        ops: list[Operation] = []
        snapshot = len(serial)
        if p.mode == SNAPSHOT:
            snapshot = rng.randint(last_commit[s] + 1, len(serial))
        for _ in range(p.ops_per_txn):
            writable = owned[s] if p.disjoint_writes else variables
            if writable and rng.random() < 0.5:
                x = rng.choice(writable)
                counter[x] += 1
                local[x] = counter[x]
                ops.append(write(x, counter[x]))
            else:
                x = rng.choice(variables)
                if x in local:
                    ops.append(read(x, local[x]))
                else:
                    visible = sum(1 for c in committed_at[x] if c < snapshot)
                    external_reads.append((tid, len(ops), x, visible))
                    ops.append(read(x, versions[x][visible - 1]))
        for x, v in local.items():
            versions[x].append(v)
            committed_at[x].append(len(serial))
        last_commit[s] = len(serial)
        serial.append(tid)
        ops_of[tid] = ops
        session_of[tid] = s

    if p.mode == STALE and p.stale_reads:
        candidates = [r for r in external_reads if r[3] >= 2]
        chosen = rng.sample(candidates, min(p.stale_reads, len(candidates)))
        for tid, k, x, nvis in sorted(chosen):
            old = versions[x][rng.randrange(nvis - 1)]
            ops_of[tid][k] = read(x, old)

    txns = [Transaction.make(t, ops_of[t]) for t in serial]
    if p.general:
        edges = []
        for i, a in enumerate(serial):
            for b in serial[i + 1:]:
                if rng.random() < p.edge_prob:
                    edges.append((a, b))
        return History.build(txns, so_edges=edges)
    sessions = [[t for t in serial if session_of[t] == s] for s in range(p.sessions)]
    return History.build(txns, sessions=sessions)


# -- figure catalogue ----------------------------------------------------------


def _t(tid: str, *ops: Operation) -> Transaction:
    return Transaction.make(tid, ops)


def _sessions(*sessions: Sequence[Transaction]) -> History:
    txns = [t for s in sessions for t in s]
    return History.build(txns, sessions=[[t.tid for t in s] for s in sessions])


r, w = read, write


def _fig5a():
    return _sessions(
        [_t("t1", w("x", 1)), _t("t2", w("x", 2), w("y", 2))],
        [_t("t3", r("y", 2), r("x", 1))],
    )


def _fig5b():
    return _sessions(
        [_t("t1", w("x", 1)), _t("t2", w("x", 2))],
        [_t("t3", r("x", 1), r("x", 2))],
    )


def _fig5c():
    return _sessions(
        [_t("t1", w("x", 1), w("y", 1))],
        [_t("t2", r("x", 1), w("y", 2)), _t("t3", r("x", 1), r("y", 1))],
    )


def _fig5d():
    return _sessions(
        [_t("t1", w("x", 1), w("y", 1))],
        [_t("t2", w("x", 2), w("y", 2))],
        [_t("t3", r("x", 1), r("y", 2))],
    )


def _fig5e():
    return _sessions(
        [_t("t1", w("x", 1))],
        [_t("t2", r("x", 1), w("x", 2))],
        [_t("t3", r("x", 1), r("y", 1))],
        [_t("t4", r("x", 2), w("y", 1))],
    )


def _fig5f():
    return _sessions(
        [_t("t1", w("x", 1), w("y", 1))],
        [_t("t2", r("x", 1), w("x", 2))],
        [_t("t3", r("y", 1), w("y", 2))],
        [_t("t4", r("x", 2), r("y", 1))],
        [_t("t5", r("y", 2), r("x", 1))],
    )


def _fig5g():
    return _sessions(
        [_t("t1", w("x", 1))],
        [_t("t2", r("x", 1), w("x", 2))],
        [_t("t3", r("x", 1), w("x", 3))],
    )


def _fig5h():
    return _sessions(
        [_t("t1", w("x", 1), w("y", 1))],
        [_t("t2", r("x", 1), r("y", 1), w("x", 2))],
        [_t("t3", r("x", 1), r("y", 1), w("y", 2))],
    )


def _fig6a():
    return _sessions(
        [_t("t1", w("x", 1), w("y", 1))],
        [_t("t2", w("x", 2), w("y", 2))],
        [_t("t3", w("z", 2))],
        [_t("t4", r("x", 1), r("y", 2), r("z", 2))],
    )


def _fig6b():
    return _sessions(
        [_t("s11", w("x", 1)), _t("s12", w("x", 2))],
        [_t("t1", r("x", 2), w("y", 1)), _t("t2", r("x", 1), r("y", 1))],
    )


def _fig6c():
    return _sessions(
        [_t("s11", w("x", 1)), _t("s12", w("x", 2))],
        [_t("t1", r("x", 2), w("y", 1))],
        [_t("t2", r("x", 1), r("y", 1))],
    )


def _fig7a():
    return _sessions(
        [_t("t1", r("x", 0)), _t("t3", w("x", 1))],
        [_t("t2", r("x", 0)), _t("t4", w("x", 2))],
    )


def _long_fork():
    return _sessions(
        [_t("t1", r("x", 0), w("x", 1))],
        [_t("t2", r("y", 0), w("y", 1))],
        [_t("t3", r("x", 1), r("y", 0))],
        [_t("t4", r("x", 0), r("y", 1))],
    )


def _lost_update():
    return _sessions(
        [_t("t1", r("x", 0), w("x", 1))],
        [_t("t2", r("x", 0), w("x", 2))],
    )


def _write_skew():
    return _sessions(
        [_t("t1", r("x", 0), r("y", 0), w("x", 1))],
        [_t("t2", r("x", 0), r("y", 0), w("y", 1))],
    )


def _comm_5sessions():
    s1 = [_t("S1a", w("x", 1)), _t("S1b", r("x", 1))]
    s2 = [_t("S2a", w("t", 1)), _t("S2b", w("y", 1), r("x", 1))]
    s3 = [_t("S3a", r("y", 1)), _t("S3b", r("z", 1))]
    s4 = [_t("S4a", w("z", 1), r("w", 1)), _t("S4b", r("t", 1))]
    s5 = [_t("S5a", w("w", 1))]
    return _sessions(s1, s2, s3, s4, s5)


CATALOGUE = {
    "fig5a": _fig5a,
    "fig5b": _fig5b,
    "fig5c": _fig5c,
    "fig5d": _fig5d,
    "fig5e": _fig5e,
    "fig5f": _fig5f,
    "fig5g": _fig5g,
    "fig5h": _fig5h,
    "fig6a": _fig6a,
    "fig6b": _fig6b,
    "fig6c": _fig6c,
    "fig7a": _fig7a,
    "fig8a": _long_fork,
    "long-fork": _long_fork,
    "fig8c": _lost_update,
    "fig9a": _lost_update,
    "lost-update": _lost_update,
    "fig9c": _write_skew,
    "write-skew": _write_skew,
    "fig10a": _comm_5sessions,
    "comm-5sessions": _comm_5sessions,
}


def canned(name: str) -> History:
    try:
        return CATALOGUE[name]()
    except KeyError:
        raise UnknownName(f"no canned history named {name!r}") from None


# -- CNF -----------------------------------------------------------------------


@dataclass(frozen=True)
class CnfInput:
    n_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for c in self.clauses:
            if not c:
                raise ValueError("clauses must be non-empty")
            for lit in c:
                if lit == 0 or abs(lit) > self.n_vars:
                    raise ValueError(f"literal {lit} out of range")


def parse_dimacs_cnf(text: str) -> CnfInput:
    n_vars = None
    clauses = []
    current: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise MalformedInput(f"bad DIMACS header {line!r}")
            n_vars = int(parts[2])
            continue
        try:
            lits = [int(tok) for tok in line.split()]
        except ValueError:
            raise MalformedInput(f"bad DIMACS line {line!r}") from None
        for lit in lits:
            if lit == 0:
                if current:
                    clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(tuple(current))
    if n_vars is None:
        n_vars = max((abs(l) for c in clauses for l in c), default=0)
    try:
        return CnfInput(n_vars, tuple(clauses))
    except ValueError as e:
        raise MalformedInput(str(e)) from None


def cnf_satisfiable(phi: CnfInput) -> bool:
    """Truth-table satisfiability, for small test formulas."""
    for bits in range(1 << phi.n_vars):
        if all(any((bits >> (abs(l) - 1) & 1) == (l > 0) for l in c) for c in phi.clauses):
            return True
    return False


def gen_from_cnf(phi: CnfInput) -> History:
    """The history h_phi: satisfiable iff phi is satisfiable (for PC, SI, SER).

    Variable ``x_k`` becomes two empty transactions ``a_k`` and ``b_k``; the
    commit order between them encodes the truth value.  Literal ``j`` of
    clause ``i`` becomes ``w``, ``y`` and ``z`` transactions over a private
    variable, where ``w`` reads ``z``'s write and ``y`` also writes it.
    """
    txns = []
    edges = []
    for k in range(1, phi.n_vars + 1):
        txns.append(Transaction.make(f"a{k}", []))
        txns.append(Transaction.make(f"b{k}", []))
    for i, clause in enumerate(phi.clauses, 1):
        m = len(clause)
        for j, lit in enumerate(clause, 1):
            v = f"v{i}_{j}"
            txns.append(Transaction.make(f"w{i}_{j}", [read(v, 2)]))
            txns.append(Transaction.make(f"y{i}_{j}", [write(v, 1)]))
            txns.append(Transaction.make(f"z{i}_{j}", [write(v, 2)]))
            nxt = j % m + 1
            edges.append((f"z{i}_{j}", f"y{i}_{nxt}"))
            k = abs(lit)
            first, second = (f"a{k}", f"b{k}") if lit > 0 else (f"b{k}", f"a{k}")
            edges.append((f"y{i}_{j}", first))
            edges.append((second, f"w{i}_{j}"))
    return History.build(txns, so_edges=edges)
