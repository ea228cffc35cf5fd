"""Communication graph of a history and component-wise checking.

Sessions are vertices, and two sessions are adjacent when they access a
common variable.  A history satisfies a criterion iff each projection onto
a biconnected component does.  The init transaction is a vertex of its own,
adjacent to a session only when that session reads an initial value.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .errors import RequiresSessionForm
from .history import INIT, History, Transaction
from .verdict import Criterion, Verdict


@dataclass
class CommGraph:
    vertices: list[str]
    edges: dict[frozenset, frozenset] = field(default_factory=dict)  # {u, v} -> shared vars
    members: dict[str, tuple[str, ...]] = field(default_factory=dict)  # vertex -> tids

    def neighbours(self, v: str) -> list[str]:
        out = []
        for e in self.edges:
            if v in e:
                (u,) = e - {v}
                out.append(u)
        return sorted(out, key=_vertex_key)


@dataclass(frozen=True)
class BiComponent:
    sessions: frozenset
    articulations: frozenset = frozenset()


def session_name(i: int) -> str:
    return f"S{i + 1}"


def _vertex_key(v: str):
    # S2 before S10; init last
    if v == INIT:
        return (1, 0)
    return (0, int(v[1:]))


def build_comm_graph(h: History) -> CommGraph:
    if not h.is_session_form:
        raise RequiresSessionForm("the communication graph needs explicit sessions")
    names = [session_name(i) for i in range(len(h.sessions))]
    g = CommGraph(names + [INIT])
    g.members = {n: tuple(s) for n, s in zip(names, h.sessions)}
    g.members[INIT] = (INIT,)
    touched: dict[str, set[str]] = {}
    for n, s in zip(names, h.sessions):
        touched[n] = {op.var for t in s for op in h[t].ops}
    zero_reads = {n: set() for n in names}
    for (r, op_id), wt in h.wro.items():
        if wt == INIT:
            sess = names[h.session_of[r][0]]
            zero_reads[sess].add(h[r].ops[op_id].var)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            shared = touched[a] & touched[b]
            if shared:
                g.edges[frozenset((a, b))] = frozenset(shared)
        if zero_reads[a]:
            g.edges[frozenset((a, INIT))] = frozenset(zero_reads[a])
    return g


def biconnected_components(g: CommGraph) -> list[BiComponent]:
    """Edge-based biconnected components (isolated vertices belong to none).

    Iterative Tarjan-Hopcroft with an edge stack.
    """
    adj = {v: g.neighbours(v) for v in g.vertices}
    disc: dict[str, int] = {}
    low: dict[str, int] = {}
    comps: list[set] = []
    counter = 0
    for root in sorted(g.vertices, key=_vertex_key):
        if root in disc:
            continue
        disc[root] = low[root] = counter
        counter += 1
        edge_stack: list[tuple[str, str]] = []
        stack = [(root, None, iter(adj[root]))]
        while stack:
            v, parent, it = stack[-1]
            advanced = False
            for u in it:
                if u not in disc:
                    disc[u] = low[u] = counter
                    counter += 1
                    edge_stack.append((v, u))
                    stack.append((u, v, iter(adj[u])))
                    advanced = True
                    break
                if u != parent and disc[u] < disc[v]:
                    edge_stack.append((v, u))
                    low[v] = min(low[v], disc[u])
            if advanced:
                continue
            stack.pop()
            if parent is None:
                continue
            low[parent] = min(low[parent], low[v])
            if low[v] >= disc[parent]:
                comp = set()
                while True:
                    e = edge_stack.pop()
                    comp.update(e)
                    if e == (parent, v):
                        break
                comps.append(comp)
    count = defaultdict(int)
    for c in comps:
        for v in c:
            count[v] += 1
    out = [
        BiComponent(frozenset(c), frozenset(v for v in c if count[v] > 1)) for c in comps
    ]
    out.sort(key=lambda c: sorted(_vertex_key(v) for v in c.sessions))
    return out


def project(h: History, c: BiComponent | set) -> History:
    """Restrict ``h`` to the sessions of ``c``; init is always kept.

    wro is restricted as well: reads whose writer lies outside the component
    are dropped from the projected transactions.
    """
    names = c.sessions if isinstance(c, BiComponent) else frozenset(c)
    sessions = [s for i, s in enumerate(h.sessions) if session_name(i) in names]
    keep = {t for s in sessions for t in s} | {INIT}
    txns: list[Transaction] = []
    for s in sessions:
        for tid in s:
            ops = [
                op for op in h[tid].ops
                if op.is_write or h.wro[(tid, op.op_id)] in keep
            ]
            txns.append(Transaction.make(tid, ops))
    return History.build(txns, sessions=sessions)


def units(h: History) -> list[frozenset]:
    """Session sets to check: biconnected components plus isolated sessions."""
    g = build_comm_graph(h)
    comps = [c.sessions for c in biconnected_components(g)]
    covered = set().union(*comps) if comps else set()
    isolated = [frozenset([v]) for v in g.vertices if v not in covered and v != INIT]
    return comps + isolated


def check_decomposed(h: History, criterion, budget: int | None = None) -> Verdict:
    from .checkers import check

    criterion = Criterion.parse(criterion)
    explored = 0
    parts = units(h)
    for comp in parts:
        sub = project(h, comp - {INIT})
        v = check(sub, criterion, budget=budget)
        explored += v.explored_states or 0
        if not v.valid:
            v.details["component"] = sorted(comp, key=_vertex_key)
            v.explored_states = explored
            return v
    return Verdict.ok(
        criterion,
        None,
        explored_states=explored,
        details={"components": [sorted(c, key=_vertex_key) for c in parts]},
    )


def stats(h: History) -> dict:
    comps = biconnected_components(build_comm_graph(h))
    return {
        "bi_nb": len(comps),
        "bi_size": max((len(c.sessions) for c in comps), default=0),
        "component_sizes": [len(c.sessions) for c in comps],
        "components": [sorted(c.sessions, key=_vertex_key) for c in comps],
    }
