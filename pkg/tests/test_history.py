import json

import pytest

from txncheck.errors import (
    AmbiguousWrite,
    CyclicSessionOrder,
    DuplicateTid,
    HistoryTooLarge,
    InternalReadMismatch,
    MalformedInput,
    UnknownValue,
    WroSoCycle,
)
from txncheck.generate import canned, CnfInput, gen_from_cnf
from txncheck.history import (
    INIT,
    History,
    Transaction,
    normalize_transaction,
    parse_history,
    read,
    serialize,
    width,
    write,
)
from txncheck.reduce import reduce_pc_to_ser


def doc(sessions):
    return json.dumps({"format": "txn-history/1", "sessions": sessions})


def ops(*items):
    return [{k: list(v)} for k, v in items]


FIG6B = doc([
    [{"id": "s11", "ops": ops(("w", ("x", 1)))}, {"id": "s12", "ops": ops(("w", ("x", 2)))}],
    [
        {"id": "t1", "ops": ops(("r", ("x", 2)), ("w", ("y", 1)))},
        {"id": "t2", "ops": ops(("r", ("x", 1)), ("r", ("y", 1)))},
    ],
])


def test_parse_fig6b():
    h = parse_history(FIG6B.encode())
    assert len(h) == 5
    assert h.sessions == (("s11", "s12"), ("t1", "t2"))
    assert ("s11", "s12") in h.so and (INIT, "t1") in h.so
    assert h.wro[("t1", 0)] == "s12"
    assert h.wro_x["y"] == {("t1", "t2")}
    assert [(o.var, o.val) for o in h[INIT].ops] == [("x", 0), ("y", 0)]


def test_empty_history_has_only_init():
    h = parse_history(doc([]))
    assert h.tids == (INIT,)
    assert width(h) == 0


def test_unknown_value():
    with pytest.raises(UnknownValue):
        parse_history(doc([[{"id": "a", "ops": ops(("r", ("x", 7)))}]]))


def test_ambiguous_write():
    with pytest.raises(AmbiguousWrite):
        parse_history(doc([[{"id": "a", "ops": ops(("w", ("x", 1)))}],
                           [{"id": "b", "ops": ops(("w", ("x", 1)))}]]))


def test_wro_so_cycle():
    # a reads b's write but b is a's session successor
    with pytest.raises(WroSoCycle):
        parse_history(doc([[{"id": "a", "ops": ops(("r", ("x", 1)))},
                            {"id": "b", "ops": ops(("w", ("x", 1)))}]]))


def test_duplicate_and_reserved_tids():
    t = {"id": "a", "ops": []}
    with pytest.raises(DuplicateTid):
        parse_history(doc([[t], [t]]))
    with pytest.raises(DuplicateTid):
        parse_history(doc([[{"id": "init", "ops": []}]]))


def test_cyclic_so_edges():
    text = json.dumps({
        "format": "txn-history/1",
        "transactions": [{"id": "a", "ops": []}, {"id": "b", "ops": []}],
        "so_edges": [["a", "b"], ["b", "a"]],
    })
    with pytest.raises(CyclicSessionOrder):
        parse_history(text)


@pytest.mark.parametrize("bad", [
    "not json",
    "[]",
    '{"sessions": [], "transactions": []}',
    '{"format": "other/9", "sessions": []}',
    '{"sessions": [[{"id": "a", "ops": [{"q": ["x", 1]}]}]]}',
    '{"sessions": [[{"id": "a", "ops": [{"w": ["x", -1]}]}]]}',
    '{"sessions": [[{"id": "a", "ops": [{"w": ["x", 0]}]}]]}',
    '{"sessions": [[{"id": "a", "ops": [{"w": ["x", true]}]}]]}',
    '{"sessions": [[{"ops": []}]]}',
    '{"transactions": [{"id": "a", "ops": []}], "so_edges": [["a", "z"]]}',
])
def test_malformed(bad):
    with pytest.raises(MalformedInput):
        parse_history(bad)


def test_size_guard(monkeypatch):
    import txncheck.history as hist

    monkeypatch.setattr(hist, "MAX_TRANSACTIONS", 3)
    with pytest.raises(HistoryTooLarge):
        History.build([Transaction.make(f"t{i}", []) for i in range(3)])


def test_normalize_keeps_last_write():
    t = Transaction.make("t", [write("x", 1), read("x", 1), write("x", 2)])
    assert normalize_transaction(t).ops == (write("x", 2),)


def test_normalize_read_before_write_unchanged():
    t = Transaction.make("t", [read("x", 0), write("x", 1)])
    n = normalize_transaction(t)
    assert [(o.kind, o.var, o.val) for o in n.ops] == [("r", "x", 0), ("w", "x", 1)]
    assert [o.op_id for o in n.ops] == [0, 1]


def test_normalize_rejects_internal_mismatch():
    with pytest.raises(InternalReadMismatch):
        normalize_transaction(Transaction.make("t", [write("x", 1), read("x", 2)]))


def test_intermediate_write_not_visible():
    # value 1 is overwritten inside t1, so nobody can observe it
    t1 = Transaction.make("t1", [write("x", 1), write("x", 2)])
    t2 = Transaction.make("t2", [read("x", 1)])
    with pytest.raises(UnknownValue):
        History.build([t1, t2])


def test_fig5e_wro():
    h = canned("fig5e")
    assert h.wro[("t3", 0)] == "t1"
    assert h.wro[("t2", 0)] == "t1"
    assert h.wro[("t3", 1)] == "t4"


def test_reads_of_zero_source_init():
    h = History.build([Transaction.make("a", [read("x", 0), read("y", 0)])])
    assert set(h.wro.values()) == {INIT}


def test_roundtrip_keeps_raw_ops():
    t = Transaction.make("t", [write("x", 1), read("x", 1), write("x", 2)])
    h = History.build([t])
    again = parse_history(serialize(h))
    assert again == h
    assert again["t"].raw_ops == t.raw_ops


def test_canonical_key_order():
    text = serialize(canned("fig7a"))
    assert text.startswith('{"format": "txn-history/1", "sessions"')
    general = serialize(gen_from_cnf(CnfInput(1, ((1,),))))
    assert general.index('"transactions"') < general.index('"so_edges"')


def test_width():
    assert width(canned("fig7a")) == 2
    single = History.build([Transaction.make("a", []), Transaction.make("b", [])],
                           sessions=[["a", "b"]])
    assert width(single) == 1
    h = canned("fig8a")
    assert width(h) == width(reduce_pc_to_ser(h)[0]) == 4


def test_width_general_form():
    txns = [Transaction.make(t, []) for t in "abcd"]
    # a < b, a < c, c < d: antichains {b, c} and {b, d}
    h = History.build(txns, so_edges=[("a", "b"), ("a", "c"), ("c", "d")])
    assert width(h) == 2
    assert width(History.build(txns, so_edges=[])) == 4
