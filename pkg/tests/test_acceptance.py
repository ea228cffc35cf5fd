"""Acceptance suite: one test per criterion, each recording a pass/fail line."""

from __future__ import annotations

import math
import random
import time

import pytest

from acceptance_log import record
from corpus import FIGURES, session_corpus, small_corpus
from txncheck.checkers import check, verdict_vector
from txncheck.commgraph import biconnected_components, build_comm_graph, check_decomposed
from txncheck.generate import (
    CnfInput,
    GenParams,
    canned,
    cnf_satisfiable,
    gen_from_cnf,
    gen_random,
)
from txncheck.history import width
from txncheck.oracle import brute_check
from txncheck.reduce import reduce_pc_to_ser, reduce_si_to_ser
from txncheck.satenc import decode, encode, solve
from txncheck.sercheck import check_ser, state_bound, verify_witness
from txncheck.verdict import Criterion

SER, SI, PC, CC, RA, RC = (Criterion.SER, Criterion.SI, Criterion.PC,
                           Criterion.CC, Criterion.RA, Criterion.RC)

# (figure, criterion, expected verdict)
FIGURE_CLAIMS = [
    ("fig5a", RC, False),
    ("fig5d", RA, False),
    ("fig5e", CC, False),
    ("fig6c", CC, False),
    ("fig6b", RA, True),
    ("fig5f", PC, False),
    ("fig8a", PC, False),
    ("fig5g", SI, False),
    ("fig5g", PC, True),
    ("fig9a", SI, False),
    ("fig9a", PC, True),
    ("fig5h", SER, False),
    ("fig5h", SI, True),
    ("fig9c", SER, False),
    ("fig9c", SI, True),
    ("fig7a", SER, True),
]


@pytest.fixture(scope="module")
def corpus():
    return small_corpus(520)


def random_cnf(seed: int) -> CnfInput:
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    clauses = tuple(
        tuple(rng.choice((1, -1)) * rng.randint(1, n) for _ in range(rng.randint(1, 2)))
        for _ in range(rng.randint(1, 3))
    )
    return CnfInput(n, clauses)


def test_criterion_1_figure_matrix():
    start = time.perf_counter()
    wrong = [
        (name, str(c)) for name, c, expected in FIGURE_CLAIMS
        if check(canned(name), c).valid != expected
    ]
    elapsed = time.perf_counter() - start
    ok = not wrong and elapsed < 1.0
    record(1, ok, f"{len(FIGURE_CLAIMS)} claims, wrong={wrong}, {elapsed:.3f}s")
    assert ok


def test_criterion_2_oracle_equivalence(corpus):
    assert len(corpus) >= 500
    assert all(len(h) - 1 <= 6 for h in corpus)
    assert any(not h.is_session_form for h in corpus)
    start = time.perf_counter()
    mismatches = []
    for i, h in enumerate(corpus):
        for c in Criterion:
            if check(h, c).valid != brute_check(h, c):
                mismatches.append((i, str(c)))
    elapsed = time.perf_counter() - start
    ok = not mismatches and elapsed < 60
    record(2, ok, f"{len(corpus)} histories x 6 criteria, mismatches={mismatches[:5]}, "
                  f"{elapsed:.1f}s")
    assert ok


def test_criterion_3_reductions(corpus):
    bad = []
    for i, h in enumerate(corpus):
        h_rw, _ = reduce_pc_to_ser(h)
        h_c, _ = reduce_si_to_ser(h)
        if brute_check(h, PC) != brute_check(h_rw, SER, max_txns=12):
            bad.append((i, "pc"))
        if brute_check(h, SI) != brute_check(h_c, SER, max_txns=12):
            bad.append((i, "si"))
        if not width(h) == width(h_rw) == width(h_c):
            bad.append((i, "width"))
    ok = not bad
    record(3, ok, f"{len(corpus)} histories, failures={bad[:5]}")
    assert ok


def test_criterion_4_entailment_chain(corpus):
    histories = (list(corpus) + session_corpus(200)
                 + [canned(n) for n in FIGURES]
                 + [gen_from_cnf(random_cnf(s)) for s in range(100)])
    broken = []
    for i, h in enumerate(histories):
        vec = list(verdict_vector(h).values())
        if any(stronger and not weaker for stronger, weaker in zip(vec, vec[1:])):
            broken.append(i)
    ok = not broken
    record(4, ok, f"{len(histories)} histories, non-monotone={broken[:5]}")
    assert ok


def test_criterion_5_np_gadget():
    start = time.perf_counter()
    bad = []
    sat_count = 0
    for seed in range(100):
        phi = random_cnf(seed)
        expected = cnf_satisfiable(phi)
        sat_count += expected
        h = gen_from_cnf(phi)
        for c in (PC, SI, SER):
            if brute_check(h, c, max_txns=None) != expected:
                bad.append((seed, str(c)))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 120
    record(5, ok, f"100 formulas ({sat_count} satisfiable), failures={bad[:5]}, "
                  f"{elapsed:.1f}s")
    assert ok


def test_criterion_6_decomposition():
    histories = session_corpus(200)
    assert all(len(h.sessions) >= 3 for h in histories)
    bad = []
    for i, h in enumerate(histories):
        for c in Criterion:
            if check_decomposed(h, c).valid != check(h, c).valid:
                bad.append((i, str(c)))
    comps = biconnected_components(build_comm_graph(canned("comm-5sessions")))
    fig10 = [set(c.sessions) for c in comps] == [{"S1", "S2"}, {"S2", "S3", "S4"}, {"S4", "S5"}]
    ok = not bad and fig10
    record(6, ok, f"{len(histories)} histories x 6 criteria, disagreements={bad[:5]}, "
                  f"fig10 components {'exact' if fig10 else 'WRONG'}")
    assert ok


def test_criterion_7_sat_agreement(corpus):
    bad = []
    for i, h in enumerate(corpus):
        for c in Criterion:
            f = encode(h, c)
            res = solve(f)
            if res.sat != check(h, c).valid:
                bad.append((i, str(c), "verdict"))
            elif res.sat and not verify_witness(h, decode(f, res.model), c):
                bad.append((i, str(c), "model"))
    ok = not bad
    record(7, ok, f"{len(corpus)} histories x 6 criteria, failures={bad[:5]}")
    assert ok


def test_criterion_8_scalability():
    points = []
    notes = []
    ok = True
    for per_session in (30, 60, 90):
        h = gen_random(GenParams(sessions=6, txns_per_session=per_session, ops_per_txn=20,
                                 vars=360, seed=per_session))
        best = math.inf
        for _ in range(3):
            start = time.perf_counter()
            v = check_ser(h)
            best = min(best, time.perf_counter() - start)
        bound = state_bound(h)
        ok &= v.valid and best < 30 and v.explored_states < bound
        points.append((len(h) - 1, best))
        notes.append(f"n={len(h) - 1}: {best:.3f}s, {v.explored_states} states")
    xs = [math.log(n) for n, _ in points]
    ys = [math.log(t) for _, t in points]
    mx, my = sum(xs) / 3, sum(ys) / 3
    slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sum((x - mx) ** 2 for x in xs)
    ok &= slope <= 3.5
    record(8, ok, "; ".join(notes) + f"; log-log slope {slope:.2f}")
    assert ok
