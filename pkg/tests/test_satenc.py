import pytest

from corpus import small_corpus
from txncheck.checkers import check
from txncheck.errors import BudgetExceeded, InstanceTooLarge
from txncheck.generate import canned
from txncheck.history import History
from txncheck.satenc import (
    CO,
    CnfFormula,
    check_via_sat,
    decode,
    emit_dimacs,
    encode,
    solve,
)
from txncheck.sercheck import verify_witness
from txncheck.verdict import Criterion


def formula(*clauses, n=None):
    f = CnfFormula()
    for c in clauses:
        for lit in c:
            while f.n_vars < abs(lit):
                f.fresh()
        f.clauses.append(list(c))
    return f


def test_trivial_solves():
    assert solve(formula([1])).sat
    assert not solve(formula([1], [-1])).sat
    res = solve(formula([1, 2], [-1, 2], [1, -2]))
    assert res.model[1] and res.model[2]


def test_pigeonhole_unsat():
    # 3 pigeons, 2 holes: p(i,h) = 2*i + h + 1
    p = lambda i, h: 2 * i + h + 1  # noqa: E731
    clauses = [[p(i, 0), p(i, 1)] for i in range(3)]
    for h in range(2):
        for i in range(3):
            for j in range(i + 1, 3):
                clauses.append([-p(i, h), -p(j, h)])
    assert not solve(formula(*clauses)).sat


def test_budget():
    p = lambda i, h: 3 * i + h + 1  # noqa: E731
    clauses = [[p(i, 0), p(i, 1), p(i, 2)] for i in range(4)]
    for h in range(3):
        for i in range(4):
            for j in range(i + 1, 4):
                clauses.append([-p(i, h), -p(j, h)])
    with pytest.raises(BudgetExceeded):
        solve(formula(*clauses), budget=1)


def test_long_clause_split():
    f = CnfFormula()
    xs = [f.fresh() for _ in range(6)]
    f.add([-x for x in xs])
    assert all(len(c) <= 3 for c in f.clauses)
    assert len(f.clauses) == 4
    f.add([x for x in xs[:5]])
    f.clauses.append([xs[5]])
    f.clauses.extend([[-x] for x in xs[:4]])
    res = solve(f)
    assert res.sat and res.model[xs[4]] and res.model[xs[5]]


def test_fig6c_cc_unsat():
    assert not solve(encode(canned("fig6c"), Criterion.CC)).sat


def test_init_only_sat():
    f = encode(History.build([]), Criterion.SER)
    assert solve(f).sat
    assert f.tids == ("init",)


def test_dimacs():
    f = formula([1, -2])
    text = emit_dimacs(f)
    assert text.splitlines()[-2:] == ["p cnf 2 1", "1 -2 0"]
    g = encode(canned("fig6b"), Criterion.RA)
    assert emit_dimacs(g) == emit_dimacs(encode(canned("fig6b"), Criterion.RA))
    assert "c 1 CAUSAL init" in emit_dimacs(g)


def test_external_solver_agrees():
    pysat = pytest.importorskip("pysat.formula")
    from pysat.solvers import Minisat22

    for name, crit, expected in [("fig6b", "ra", True), ("fig6c", "cc", False),
                                 ("write-skew", "si", True), ("write-skew", "ser", False)]:
        cnf = pysat.CNF(from_string=emit_dimacs(encode(canned(name), crit)))
        with Minisat22(bootstrap_with=cnf.clauses) as s:
            assert s.solve() == expected


def test_cubic_clause_growth():
    h = small_corpus(1)[0]
    n = len(h.tids)
    f = encode(h, Criterion.RC)
    # two transitivity families dominate
    assert len(f.clauses) >= 2 * n * (n - 1) * (n - 2)


def test_size_guard():
    with pytest.raises(InstanceTooLarge):
        encode(canned("fig5h"), Criterion.SER, max_txns=2)


def test_agreement_and_decoding():
    for h in small_corpus(120, offset=4000):
        for crit in Criterion:
            f = encode(h, crit)
            res = solve(f)
            assert res.sat == check(h, crit).valid
            if res.sat:
                order = decode(f, res.model)
                pos = {t: i for i, t in enumerate(order)}
                for (tag, a, b), v in f.var_map.items():
                    if tag == CO:
                        assert res.model[v] == (pos[a] < pos[b])
                assert verify_witness(h, order, crit)


def test_check_via_sat():
    v = check_via_sat(canned("fig7a"), "ser")
    assert v.valid and verify_witness(canned("fig7a"), v.witness, Criterion.SER)
