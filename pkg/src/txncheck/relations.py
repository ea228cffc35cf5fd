"""Binary relations over hashable nodes, represented as sets of pairs."""

from __future__ import annotations

import heapq
from collections import defaultdict, deque
from typing import Hashable, Iterable

Pair = tuple[Hashable, Hashable]


class CycleError(ValueError):
    pass


def successors(rel: Iterable[Pair]) -> dict:
    succ: dict = defaultdict(set)
    for a, b in rel:
        succ[a].add(b)
    return succ


def transitive_closure(rel: Iterable[Pair]) -> set[Pair]:
    succ = successors(rel)
    closure = set()
    for src in list(succ):
        seen = set()
        stack = list(succ[src])
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            stack.extend(succ.get(n, ()))
        closure.update((src, n) for n in seen)
    return closure


def compose(r1: Iterable[Pair], r2: Iterable[Pair]) -> set[Pair]:
    succ2 = successors(r2)
    return {(a, c) for a, b in r1 for c in succ2.get(b, ())}


def topo_sort(rel: Iterable[Pair], nodes: Iterable[Hashable] = ()) -> list:
    """Topological order of ``rel``; ties go to the smallest node.

    Raises :class:`CycleError` when ``rel`` is cyclic.
    """
    rel = set(rel)
    all_nodes = set(nodes)
    for a, b in rel:
        all_nodes.add(a)
        all_nodes.add(b)
    succ = successors(rel)
    indeg = dict.fromkeys(all_nodes, 0)
    for a, b in rel:
        indeg[b] += 1
    heap = [n for n, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        n = heapq.heappop(heap)
        order.append(n)
        for m in succ.get(n, ()):
            indeg[m] -= 1
            if indeg[m] == 0:
                heapq.heappush(heap, m)
    if len(order) != len(all_nodes):
        raise CycleError("relation is cyclic")
    return order


def is_acyclic(rel: Iterable[Pair]) -> bool:
    try:
        topo_sort(rel)
    except CycleError:
        return False
    return True


def shortest_path(rel: Iterable[Pair], src, dst) -> list | None:
    """Shortest path ``src -> ... -> dst`` as a node list, or None."""
    succ = successors(rel)
    parent = {src: None}
    queue = deque([src])
    while queue:
        n = queue.popleft()
        for m in sorted(succ.get(n, ())):
            if m in parent:
                continue
            parent[m] = n
            if m == dst:
                path = [m]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return path[::-1]
            queue.append(m)
    return None


def shortest_cycle_through(rel: Iterable[Pair], edge: Pair) -> list | None:
    """Minimal-length cycle containing ``edge``, as a node list starting at
    ``edge[0]`` (the closing edge back to it is implicit)."""
    rel = set(rel)
    a, b = edge
    if edge not in rel:
        return None
    if a == b:
        return [a]
    back = shortest_path(rel, b, a)
    if back is None:
        return None
    return [a] + back[:-1]


def find_cycle(rel: Iterable[Pair]) -> list | None:
    """Some shortest cycle of ``rel`` (searching edges in sorted order)."""
    rel = set(rel)
    best = None
    for edge in sorted(rel):
        cyc = shortest_cycle_through(rel, edge)
        if cyc is not None and (best is None or len(cyc) < len(best)):
            best = cyc
    return best
