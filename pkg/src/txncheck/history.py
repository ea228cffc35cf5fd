"""History data model, JSON input/output, normalization and write-read derivation.

A history is a set of committed transactions, a session order and a
write-read relation.  The write-read relation is never given explicitly: it is
recovered from values, which are unique per variable.  Every history contains
an implicit ``init`` transaction writing 0 to every variable; it precedes all
other transactions in session order.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import (
    AmbiguousWrite,
    CyclicSessionOrder,
    DuplicateTid,
    HistoryTooLarge,
    InternalReadMismatch,
    MalformedInput,
    UnknownValue,
    WroSoCycle,
)
from .relations import CycleError, topo_sort, transitive_closure

INIT = "init"
FORMAT = "txn-history/1"
MAX_TRANSACTIONS = 100_000

READ = "r"
WRITE = "w"


@dataclass(frozen=True)
class Operation:
    kind: str
    var: str
    val: int
    op_id: int = 0

    @property
    def is_read(self) -> bool:
        return self.kind == READ

    @property
    def is_write(self) -> bool:
        return self.kind == WRITE

    def __str__(self) -> str:
        if self.is_read:
            return f"r({self.var},{self.val})"
        return f"w({self.var},{self.val})"


def read(var: str, val: int) -> Operation:
    return Operation(READ, var, val)


def write(var: str, val: int) -> Operation:
    return Operation(WRITE, var, val)


def _renumber(ops: Iterable[Operation]) -> tuple[Operation, ...]:
    return tuple(Operation(o.kind, o.var, o.val, i) for i, o in enumerate(ops))


@dataclass(frozen=True)
class Transaction:
    """``ops`` are the externally relevant operations in program order;
    ``raw_ops`` is the transaction as recorded."""

    tid: str
    ops: tuple[Operation, ...]
    raw_ops: tuple[Operation, ...] = field(default=(), compare=False)

    @classmethod
    def make(cls, tid: str, ops: Iterable[Operation]) -> "Transaction":
        ops = _renumber(ops)
        return cls(tid, ops, ops)

    @property
    def reads(self) -> tuple[Operation, ...]:
        return tuple(o for o in self.ops if o.is_read)

    @property
    def writes(self) -> tuple[Operation, ...]:
        return tuple(o for o in self.ops if o.is_write)

    @cached_property
    def write_vars(self) -> frozenset[str]:
        return frozenset(o.var for o in self.ops if o.is_write)

    @cached_property
    def read_vars(self) -> frozenset[str]:
        return frozenset(o.var for o in self.ops if o.is_read)

    def writes_var(self, var: str) -> bool:
        return var in self.write_vars


def normalize_transaction(t: Transaction) -> Transaction:
    """Drop reads that follow a local write of the same variable and keep only
    the last write per variable.

    A dropped read must return the latest local write, otherwise the recording
    is inconsistent and :class:`InternalReadMismatch` is raised.
    """
    last_local: dict[str, int] = {}
    last_write_pos: dict[str, int] = {}
    for pos, op in enumerate(t.ops):
        if op.is_write:
            last_local[op.var] = op.val
            last_write_pos[op.var] = pos
        elif op.var in last_local and last_local[op.var] != op.val:
            raise InternalReadMismatch(
                f"{t.tid}: {op} after local write of {last_local[op.var]}"
            )
    seen_write: set[str] = set()
    kept = []
    for pos, op in enumerate(t.ops):
        if op.is_write:
            if last_write_pos[op.var] == pos:
                kept.append(op)
            seen_write.add(op.var)
        elif op.var not in seen_write:
            kept.append(op)
    raw = t.raw_ops or t.ops
    return Transaction(t.tid, _renumber(kept), raw)


class History:
    """An immutable history.

    Exactly one of ``sessions`` (session form) and ``so_edges`` (general form)
    is set.  ``wro`` maps ``(reader tid, op_id)`` to the writer tid.
    Use :meth:`build` or :func:`parse_history` rather than the constructor.
    """

    def __init__(
        self,
        transactions: dict[str, Transaction],
        sessions: tuple[tuple[str, ...], ...] | None,
        so_edges: tuple[tuple[str, str], ...] | None,
        wro: dict[tuple[str, int], str],
    ):
        self.transactions = transactions
        self.sessions = sessions
        self.so_edges = so_edges
        self.wro = wro

    # -- construction -----------------------------------------------------

    @classmethod
    def build(
        cls,
        transactions: Iterable[Transaction],
        sessions: Sequence[Sequence[str]] | None = None,
        so_edges: Iterable[tuple[str, str]] | None = None,
    ) -> "History":
        """Normalize ``transactions``, synthesize ``init``, derive write-read
        and validate.  Omitting both ``sessions`` and ``so_edges`` puts every
        transaction in its own session."""
        txns = list(transactions)
        if len(txns) + 1 > MAX_TRANSACTIONS:
            raise HistoryTooLarge(f"{len(txns)} transactions, limit is {MAX_TRANSACTIONS}")
        by_tid: dict[str, Transaction] = {}
        for t in txns:
            if t.tid == INIT or t.tid in by_tid:
                raise DuplicateTid(t.tid)
            for op in t.ops:
                if op.is_write and op.val == 0:
                    raise MalformedInput(f"{t.tid}: value 0 is reserved for init")
            by_tid[t.tid] = normalize_transaction(t)
        if sessions is None and so_edges is None:
            sessions = [[t.tid] for t in txns]

        if sessions is not None:
            sessions = tuple(tuple(s) for s in sessions)
            placed = [tid for s in sessions for tid in s]
            if len(set(placed)) != len(placed):
                raise DuplicateTid("transaction appears twice in sessions")
            if set(placed) != set(by_tid):
                raise MalformedInput("sessions must list every transaction exactly once")
            edges = None
        else:
            edges = tuple((a, b) for a, b in so_edges)
            for a, b in edges:
                if a not in by_tid or b not in by_tid:
                    raise MalformedInput(f"so edge ({a}, {b}) names an unknown transaction")
            try:
                topo_sort(edges, by_tid)
            except CycleError:
                raise CyclicSessionOrder("so_edges contain a cycle") from None

        variables = sorted({op.var for t in by_tid.values() for op in t.ops}
                           | {op.var for t in by_tid.values() for op in t.raw_ops})
        init = Transaction.make(INIT, [write(x, 0) for x in variables])
        all_txns = {INIT: init, **by_tid}
        wro = derive_wro(all_txns)
        h = cls(all_txns, sessions, edges, wro)
        h._check_acyclic()
        return h

    def _check_acyclic(self) -> None:
        rel = set(self.so_cover) | self.wro_pairs
        try:
            topo_sort(rel, self.transactions)
        except CycleError:
            raise WroSoCycle("session order and write-read relation form a cycle") from None

    # -- basic views ------------------------------------------------------

    @property
    def is_session_form(self) -> bool:
        return self.sessions is not None

    @cached_property
    def tids(self) -> tuple[str, ...]:
        return tuple(self.transactions)

    def __getitem__(self, tid: str) -> Transaction:
        return self.transactions[tid]

    def __len__(self) -> int:
        return len(self.transactions)

    def __eq__(self, other) -> bool:
        if not isinstance(other, History):
            return NotImplemented
        return (
            self.transactions == other.transactions
            and self.sessions == other.sessions
            and (None if self.so_edges is None else set(self.so_edges))
            == (None if other.so_edges is None else set(other.so_edges))
            and self.wro == other.wro
        )

    __hash__ = None

    def __repr__(self) -> str:
        form = f"{len(self.sessions)} sessions" if self.is_session_form else "general so"
        return f"<History {len(self) - 1} txns, {form}>"

    @cached_property
    def variables(self) -> tuple[str, ...]:
        return tuple(op.var for op in self.transactions[INIT].ops)

    # -- session order ----------------------------------------------------

    @cached_property
    def so_cover(self) -> tuple[tuple[str, str], ...]:
        """A generating set of edges for the session order, init included."""
        if self.is_session_form:
            edges = []
            for s in self.sessions:
                if s:
                    edges.append((INIT, s[0]))
                edges.extend(zip(s, s[1:]))
            return tuple(edges)
        has_pred = {b for _, b in self.so_edges}
        edges = [(INIT, t) for t in self.tids if t != INIT and t not in has_pred]
        return tuple(edges) + self.so_edges

    @cached_property
    def so(self) -> frozenset[tuple[str, str]]:
        """The session order as a (transitively closed) strict partial order."""
        if self.is_session_form:
            pairs = set()
            for s in self.sessions:
                for i, a in enumerate(s):
                    pairs.add((INIT, a))
                    pairs.update((a, b) for b in s[i + 1:])
            return frozenset(pairs)
        closure = transitive_closure(self.so_cover)
        # init precedes every transaction even with no edges at all
        closure.update((INIT, t) for t in self.tids if t != INIT)
        return frozenset(closure)

    @cached_property
    def so_pred(self) -> dict[str, frozenset[str]]:
        pred = defaultdict(set)
        for a, b in self.so:
            pred[b].add(a)
        return {t: frozenset(pred.get(t, ())) for t in self.tids}

    @cached_property
    def session_of(self) -> dict[str, tuple[int, int]]:
        """tid -> (session index, position) for session-form histories."""
        if not self.is_session_form:
            return {}
        return {t: (i, j) for i, s in enumerate(self.sessions) for j, t in enumerate(s)}

    # -- write-read -------------------------------------------------------

    @cached_property
    def wro_pairs(self) -> frozenset[tuple[str, str]]:
        return frozenset((w, r) for (r, _), w in self.wro.items())

    @cached_property
    def wro_x(self) -> dict[str, frozenset[tuple[str, str]]]:
        per_var = defaultdict(set)
        for (r, op_id), w in self.wro.items():
            per_var[self.transactions[r].ops[op_id].var].add((w, r))
        return {x: frozenset(p) for x, p in per_var.items()}

    @cached_property
    def wro_pred(self) -> dict[str, frozenset[str]]:
        pred = defaultdict(set)
        for w, r in self.wro_pairs:
            pred[r].add(w)
        return {t: frozenset(pred.get(t, ())) for t in self.tids}

    @cached_property
    def writers(self) -> dict[str, tuple[str, ...]]:
        """variable -> transactions writing it (init first)."""
        out = defaultdict(list)
        for t in self.transactions.values():
            for op in t.writes:
                out[op.var].append(t.tid)
        return {x: tuple(v) for x, v in out.items()}

    def source(self, tid: str, op_id: int) -> str:
        return self.wro[(tid, op_id)]

    @cached_property
    def causal(self) -> frozenset[tuple[str, str]]:
        """``(so | wro)+``."""
        return frozenset(transitive_closure(set(self.so) | self.wro_pairs))


def derive_wro(transactions: dict[str, Transaction]) -> dict[tuple[str, int], str]:
    """Map every external read to the transaction that wrote its value."""
    writer_of: dict[tuple[str, int], str] = {}
    for t in transactions.values():
        for op in t.writes:
            key = (op.var, op.val)
            if key in writer_of and writer_of[key] != t.tid:
                raise AmbiguousWrite(
                    f"{op.var}={op.val} written by both {writer_of[key]} and {t.tid}"
                )
            writer_of[key] = t.tid
    wro = {}
    for t in transactions.values():
        for op in t.reads:
            w = INIT if op.val == 0 else writer_of.get((op.var, op.val))
            if w is None:
                raise UnknownValue(f"{t.tid} reads {op.var}={op.val}, which nobody wrote")
            wro[(t.tid, op.op_id)] = w
    return wro


# -- JSON ---------------------------------------------------------------------


def _parse_ops(tid: str, raw) -> list[Operation]:
    if not isinstance(raw, list):
        raise MalformedInput(f"{tid}: ops must be a list")
    ops = []
    for item in raw:
        if not isinstance(item, dict) or len(item) != 1:
            raise MalformedInput(f"{tid}: bad op {item!r}")
        (kind, arg), = item.items()
        if kind not in (READ, WRITE):
            raise MalformedInput(f"{tid}: op kind must be 'r' or 'w', got {kind!r}")
        if not (isinstance(arg, list) and len(arg) == 2):
            raise MalformedInput(f"{tid}: op argument must be [var, value]")
        var, val = arg
        if not isinstance(var, str) or not var:
            raise MalformedInput(f"{tid}: variable must be a non-empty string")
        if isinstance(val, bool) or not isinstance(val, int) or val < 0:
            raise MalformedInput(f"{tid}: value must be a non-negative integer")
        ops.append(Operation(kind, var, val))
    return ops


def _parse_txn(raw) -> Transaction:
    if not isinstance(raw, dict) or "id" not in raw or "ops" not in raw:
        raise MalformedInput(f"bad transaction {raw!r}")
    tid = raw["id"]
    if not isinstance(tid, str) or not tid:
        raise MalformedInput(f"transaction id must be a non-empty string, got {tid!r}")
    return Transaction.make(tid, _parse_ops(tid, raw["ops"]))


def parse_history(data: bytes | str) -> History:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise MalformedInput(str(e)) from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise MalformedInput(f"invalid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise MalformedInput("top level must be an object")
    fmt = doc.get("format", FORMAT)
    if fmt != FORMAT:
        raise MalformedInput(f"unsupported format {fmt!r}")
    if ("sessions" in doc) == ("transactions" in doc):
        raise MalformedInput("exactly one of 'sessions' and 'transactions' is required")
    if "sessions" in doc:
        sessions = doc["sessions"]
        if not isinstance(sessions, list) or not all(isinstance(s, list) for s in sessions):
            raise MalformedInput("'sessions' must be a list of lists")
        txns = [[_parse_txn(t) for t in s] for s in sessions]
        return History.build(
            [t for s in txns for t in s], sessions=[[t.tid for t in s] for s in txns]
        )
    raw_txns = doc["transactions"]
    edges = doc.get("so_edges", [])
    if not isinstance(raw_txns, list):
        raise MalformedInput("'transactions' must be a list")
    if not isinstance(edges, list) or not all(
        isinstance(e, list) and len(e) == 2 and all(isinstance(v, str) for v in e) for e in edges
    ):
        raise MalformedInput("'so_edges' must be a list of [tid, tid] pairs")
    return History.build([_parse_txn(t) for t in raw_txns], so_edges=[tuple(e) for e in edges])


def load_history(path) -> History:
    with open(path, "rb") as f:
        return parse_history(f.read())


def _ops_json(t: Transaction) -> list:
    return [{op.kind: [op.var, op.val]} for op in t.raw_ops]


def to_json(h: History) -> dict:
    if h.is_session_form:
        return {
            "format": FORMAT,
            "sessions": [
                [{"id": tid, "ops": _ops_json(h[tid])} for tid in s] for s in h.sessions
            ],
        }
    return {
        "format": FORMAT,
        "transactions": [
            {"id": tid, "ops": _ops_json(h[tid])} for tid in h.tids if tid != INIT
        ],
        "so_edges": [list(e) for e in h.so_edges],
    }


def serialize(h: History, indent: int | None = None) -> str:
    return json.dumps(to_json(h), indent=indent, ensure_ascii=False)


# -- width --------------------------------------------------------------------


def width(h: History) -> int:
    """Largest set of mutually so-unordered transactions, init excluded."""
    if h.is_session_form:
        return sum(1 for s in h.sessions if s)
    nodes = [t for t in h.tids if t != INIT]
    return len(nodes) - _max_matching(nodes, h.so)


def _max_matching(nodes: list[str], order: frozenset) -> int:
    # Dilworth: min chain cover = n - max matching on the comparability DAG
    succ = defaultdict(list)
    for a, b in order:
        if a != INIT:
            succ[a].append(b)
    match_right: dict[str, str] = {}

    def augment(u, seen):
        for v in succ[u]:
            if v in seen:
                continue
            seen.add(v)
            if v not in match_right or augment(match_right[v], seen):
                match_right[v] = u
                return True
        return False

    return sum(1 for u in nodes if augment(u, set()))
