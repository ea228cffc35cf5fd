import networkx as nx
import pytest

from corpus import session_corpus
from txncheck.checkers import check
from txncheck.commgraph import (
    biconnected_components,
    build_comm_graph,
    check_decomposed,
    project,
    stats,
)
from txncheck.errors import RequiresSessionForm
from txncheck.generate import CnfInput, canned, gen_from_cnf
from txncheck.history import INIT, History, Transaction, read, write
from txncheck.verdict import Criterion


def edges_of(g):
    return {tuple(sorted(e)): set(v) for e, v in g.edges.items()}


def test_fig10_graph():
    g = build_comm_graph(canned("comm-5sessions"))
    assert edges_of(g) == {
        ("S1", "S2"): {"x"},
        ("S2", "S3"): {"y"},
        ("S3", "S4"): {"z"},
        ("S2", "S4"): {"t"},
        ("S4", "S5"): {"w"},
    }


def test_fig10_components():
    comps = biconnected_components(build_comm_graph(canned("comm-5sessions")))
    assert [set(c.sessions) for c in comps] == [{"S1", "S2"}, {"S2", "S3", "S4"}, {"S4", "S5"}]
    assert comps[1].articulations == {"S2", "S4"}


def _sessions(*sessions):
    txns = [t for s in sessions for t in s]
    return History.build(txns, sessions=[[t.tid for t in s] for s in sessions])


def test_small_graphs():
    one = _sessions([Transaction.make("a", [write("x", 1)])])
    assert build_comm_graph(one).edges == {}
    disjoint = _sessions([Transaction.make("a", [write("x", 1)])],
                         [Transaction.make("b", [write("y", 1)])])
    assert build_comm_graph(disjoint).edges == {}


def test_path_and_clique():
    path = _sessions(
        [Transaction.make("a", [write("p", 1)])],
        [Transaction.make("b", [write("p", 2), write("q", 1)])],
        [Transaction.make("c", [write("q", 2), write("r", 1)])],
        [Transaction.make("d", [write("r", 2)])],
    )
    comps = biconnected_components(build_comm_graph(path))
    assert [len(c.sessions) for c in comps] == [2, 2, 2]
    clique = _sessions(*[[Transaction.make(f"t{i}", [write("x", i)])] for i in range(1, 5)])
    assert len(biconnected_components(build_comm_graph(clique))) == 1


def test_init_edges_only_for_zero_reads():
    h = canned("lost-update")
    g = build_comm_graph(h)
    assert ("S1", INIT) in edges_of(g) or (INIT, "S1") in edges_of(g)
    g10 = build_comm_graph(canned("comm-5sessions"))
    assert all(INIT not in e for e in g10.edges)


def test_against_networkx():
    for h in session_corpus(120):
        g = build_comm_graph(h)
        ng = nx.Graph()
        ng.add_nodes_from(g.vertices)
        ng.add_edges_from(tuple(e) for e in g.edges)
        ours = sorted(sorted(c.sessions) for c in biconnected_components(g))
        theirs = sorted(sorted(c) for c in nx.biconnected_components(ng))
        assert ours == theirs
        arts = set().union(*(c.articulations for c in biconnected_components(g)), set())
        assert arts == set(nx.articulation_points(ng))


def test_projection():
    h = canned("comm-5sessions")
    p = project(h, {"S4", "S5"})
    assert len(p) == 4
    assert p.sessions == (("S4a", "S4b"), ("S5a",))
    # S4b's read of t comes from S2, outside the component
    assert p["S4b"].ops == ()
    assert project(h, {f"S{i}" for i in range(1, 6)}) == h


def test_projection_preserves_invariants():
    for h in session_corpus(60):
        comps = biconnected_components(build_comm_graph(h))
        for c in comps:
            p = project(h, c.sessions - {INIT})
            assert set(p.tids) <= set(h.tids)
            assert set(p.wro_pairs) <= set(h.wro_pairs)


def test_fig10_decomposed_ser():
    v = check_decomposed(canned("comm-5sessions"), Criterion.SER)
    assert v.valid
    assert len(v.details["components"]) == 3


def test_single_component_same_verdict():
    h = canned("lost-update")
    for c in Criterion:
        assert check_decomposed(h, c).valid == check(h, c).valid


def test_requires_sessions():
    with pytest.raises(RequiresSessionForm):
        build_comm_graph(gen_from_cnf(CnfInput(1, ((1,),))))


def test_stats():
    s = stats(canned("comm-5sessions"))
    assert s["bi_nb"] == 3 and s["bi_size"] == 3
    assert s["component_sizes"] == [2, 3, 2]
