from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from approxgroups.errors import BudgetExceeded, PreconditionError
from approxgroups.freecert import (
    NO_RELATION,
    PING_PONG,
    FreenessCertificate,
    Relation,
    count_reduced_words,
    evaluate,
    format_word,
    free_pair_search,
    freeness_failure,
    no_relation_check,
    pingpong_certify,
    relation_failure,
    shortest_relation_bruteforce,
)
from approxgroups.groups import FreeAbelian, FreeGroup, MatrixGroup
from approxgroups.sets import ElementSet, ball, budget, symmetrize
from approxgroups.tables import small_groups

M = MatrixGroup(2)
F2 = FreeGroup(2)
SANOV = (M.matrix([[1, 2], [0, 1]]), M.matrix([[1, 0], [2, 1]]))
UNIT = (M.matrix([[1, 1], [0, 1]]), M.matrix([[1, 0], [1, 1]]))


def test_pingpong_examples():
    cert = pingpong_certify(M, *SANOV)
    assert cert is not None and cert.mode == PING_PONG
    assert (cert.details["t"], cert.details["s"]) == (2, 2)
    assert pingpong_certify(M, *UNIT) is None
    assert pingpong_certify(M, M.identity(), SANOV[1]) is None
    # either order, any |t|, |s| >= 2
    assert pingpong_certify(M, M.matrix([[1, 0], [-3, 1]]), M.matrix([[1, 5], [0, 1]])) is not None
    assert pingpong_certify(M, SANOV[0], M.matrix([[1, 3], [0, 1]])) is None
    with pytest.raises(PreconditionError):
        pingpong_certify(F2, F2.word("a"), F2.word("b"))


def test_sanov_survives_relation_search_up_to_14():
    for L in range(1, 15):
        res = no_relation_check(M, *SANOV, L)
        assert isinstance(res, FreenessCertificate) and res.mode == NO_RELATION
        assert res.details["words_excluded"] == count_reduced_words(L)


def test_unit_pair_relation():
    a, b = UNIT
    w = (1, -2, 1)
    minus_one = M.matrix([[-1, 0], [0, -1]])
    assert evaluate(M, a, b, w + w) == minus_one
    assert evaluate(M, a, b, w * 4) == M.identity()
    res = no_relation_check(M, a, b, 12)
    assert isinstance(res, Relation) and res.length <= 12
    oracle = shortest_relation_bruteforce(M, a, b, 8)
    assert oracle is not None and res.word == oracle.word
    # frozen: the braid relation makes the shortest relation have length 6
    assert res.length == 6
    assert relation_failure(M, res) is None


def test_no_relation_examples():
    res = no_relation_check(F2, F2.word("a"), F2.word("b"), 10)
    assert isinstance(res, FreenessCertificate)
    Z = FreeAbelian(1)
    res = no_relation_check(Z, (1,), (1,), 2)
    assert isinstance(res, Relation) and format_word(res.word) == "a b⁻¹"
    with pytest.raises(PreconditionError):
        no_relation_check(Z, (1,), (1,), 0)


def test_no_relation_budget():
    with budget(1000):
        with pytest.raises(BudgetExceeded):
            no_relation_check(F2, F2.word("a"), F2.word("b"), 20)


def _pairs_for(r: random.Random):
    groups = [G for _, G in small_groups(8)]
    G = r.choice(groups)
    yield G, r.randrange(G.order), r.randrange(G.order)
    rows = lambda: [[r.randint(-2, 2) for _ in range(2)] for _ in range(2)]
    while True:
        u, v = rows(), rows()
        if abs(u[0][0] * u[1][1] - u[0][1] * u[1][0]) == 1 and abs(v[0][0] * v[1][1] - v[0][1] * v[1][0]) == 1:
            yield M, M.matrix(u), M.matrix(v)
            return


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6))
def test_meet_in_middle_matches_bruteforce(seed, L):
    r = random.Random(seed)
    for ctx, a, b in _pairs_for(r):
        res = no_relation_check(ctx, a, b, L)
        oracle = shortest_relation_bruteforce(ctx, a, b, L)
        if oracle is None:
            assert isinstance(res, FreenessCertificate)
        else:
            assert isinstance(res, Relation) and res.word == oracle.word


def test_no_relation_monotone():
    a, b = M.matrix([[1, 3], [0, 1]]), M.matrix([[2, 1], [1, 1]])
    results = [isinstance(no_relation_check(M, a, b, L), FreenessCertificate) for L in range(1, 10)]
    # once a relation appears it persists at every larger L
    assert results == sorted(results, reverse=True)


def test_free_pair_search_sanov():
    A = symmetrize(ElementSet(M, SANOV))
    hit = free_pair_search(A, m=1, L=8)
    assert hit is not None and hit.mode == PING_PONG
    gens = set(SANOV) | {M.inv(x) for x in SANOV}
    assert set(hit.pair) <= gens
    assert freeness_failure(M, hit.certificate) is None


def test_free_pair_search_free_ball():
    hit = free_pair_search(ball(F2, radius=1), m=1, L=10)
    assert hit is not None and hit.mode == NO_RELATION
    a, b = hit.pair
    assert {F2.length(a), F2.length(b)} == {1} and a[0] != b[0]


def test_free_pair_search_amenable_families_none():
    Z2 = FreeAbelian(2)
    assert free_pair_search(ball(Z2, radius=1), m=1, L=4) is None
    assert free_pair_search(ball(Z2, radius=1), m=2, L=4) is None
    for _, G in small_groups(6):
        assert free_pair_search(ElementSet(G, range(G.order)), m=1, L=max(G.order, 4)) is None
    with pytest.raises(PreconditionError):
        free_pair_search(ball(Z2, radius=1), m=0, L=4)


def test_failure_checks_catch_tampering():
    cert = FreenessCertificate(PING_PONG, UNIT, {})
    assert freeness_failure(M, cert) is not None
    cert = FreenessCertificate(NO_RELATION, UNIT, {"L": 12})
    assert freeness_failure(M, cert)["relation"]
    assert freeness_failure(M, FreenessCertificate("magic", UNIT, {})) is not None
    assert relation_failure(M, Relation(SANOV, (1, -2, 1))) is not None
    assert relation_failure(M, Relation(UNIT, (1, -1))) is not None
