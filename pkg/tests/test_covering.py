from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from approxgroups.covering import (
    ControlWitness,
    CoverCertificate,
    approx_failure,
    cover_failure,
    find_witness,
    minimal_witness,
    ruzsa_cover,
    subgroup_control,
    verify_approx,
    verify_control,
    verify_cover,
)
from approxgroups.errors import NotSymmetricError, PreconditionError
from approxgroups.groups import FreeAbelian, FreeGroup, Heisenberg
from approxgroups.oracles import subgroup_oracle
from approxgroups.sets import ElementSet, ball, identity_set, power, product
from approxgroups.tables import cyclic, dihedral, small_groups
from reference import min_symmetric_witness

F2 = FreeGroup(2)
Z = FreeAbelian(1)
Z2 = FreeAbelian(2)


def zset(values) -> ElementSet:
    return ElementSet(Z, [(v,) for v in values])


def interval(N: int) -> ElementSet:
    return zset(range(-N, N + 1))


# -- verification ---------------------------------------------------------------


def test_verify_approx_examples():
    for N in range(1, 8):
        assert verify_approx(interval(N), zset([-N, 0, N]), 3)
    C6 = cyclic(6)
    sub = ElementSet(C6, [0, 2, 4])
    assert verify_approx(sub, identity_set(C6), 1)
    B2 = ball(F2, radius=2)
    assert verify_approx(B2, B2, 17)


def test_verify_approx_failures_are_specific():
    A = interval(5)
    assert approx_failure(A, zset([5]), 3)["condition"] == "X symmetric"
    assert approx_failure(A, zset([-5, 0, 5]), 2)["condition"] == "|X| <= K"
    fail = approx_failure(A, zset([-1, 0, 1]), 3)
    assert fail == {"condition": "A^2 ⊆ A X", "missing": [-10]}
    with pytest.raises(NotSymmetricError):
        verify_approx(zset([0, 1]), zset([0]), 1)


def _naive_approx(A, X, K) -> bool:
    ctx = A.ctx
    if any(ctx.inv(x) not in X.elements for x in X) or len(X) > K:
        return False
    AX = {ctx.mul(a, x) for a in A for x in X}
    return all(ctx.mul(a, b) in AX for a in A for b in A)


@given(st.sets(st.integers(1, 12), max_size=5), st.sets(st.integers(0, 12), max_size=4), st.integers(1, 9))
def test_verify_approx_matches_double_loop(a, x, K):
    A = zset({0} | a | {-v for v in a})
    X = zset(x | {-v for v in x})
    assert verify_approx(A, X, K) == _naive_approx(A, X, K)


def test_verify_control_examples():
    for S in [interval(3), ball(F2, radius=1)]:
        assert verify_control(S, ControlWitness(S, identity_set(S.ctx), 1))
    for N in range(1, 6):
        assert verify_control(interval(2 * N), ControlWitness(interval(N), zset([-N, 0, N]), 3))
    B1, B2 = ball(F2, radius=1), ball(F2, radius=2)
    assert verify_control(B2, ControlWitness(B1, B1, 5))
    assert not verify_control(B2, ControlWitness(B1, B1, 4))


# -- witness search -------------------------------------------------------------


def test_find_witness_on_intervals_vs_exhaustive():
    for N in range(1, 6):
        A = interval(N)
        w = find_witness(A, 4)
        assert w is not None and w.verified and len(w.X) <= 3
        exact = min_symmetric_witness(
            {(v,) for v in range(-2 * N, 2 * N + 1)},
            set(A.elements),
            {(v,) for v in range(-3 * N, 3 * N + 1)},
            Z.mul,
            Z.inv,
        )
        # frozen: {-N, N} is optimal on intervals
        assert exact == 2
        assert len(w.X) >= exact


def test_find_witness_subgroup_is_identity():
    D4 = dihedral(4)
    w = find_witness(ElementSet(D4, range(8)), 1)
    assert w.X == identity_set(D4)


def test_ball_one_needs_four():
    # a^2, a^-2, b^2, b^-2 have pairwise disjoint candidate sets u^-1 y (u in B_1),
    # so |X| >= 4, and {a, a^-1, b, b^-1} attains it
    B1 = ball(F2, radius=1)
    assert find_witness(B1, 3) is None
    w = find_witness(B1, 4)
    assert w is not None and w.X == B1 - identity_set(F2)
    B3 = ball(F2, radius=3)
    X = minimal_witness(B1, pool=B3)
    assert X is not None and len(X) == 4
    assert verify_approx(B1, X, 4)


def test_greedy_within_reported_bound_small_tables():
    r = random.Random(3)
    for name, G in small_groups(8):
        for _ in range(10):
            picks = r.sample(range(G.order), r.randint(0, min(3, G.order)))
            A = ElementSet(G, [G.identity()] + picks + [G.inv(p) for p in picks])
            w = find_witness(A, G.order)
            assert w is not None and verify_approx(A, w.X, w.K)
            if w.exact_min is not None:
                assert w.exact_min <= w.greedy_size <= w.approx_bound
                pool = set(product(A, A).elements)
                assert w.exact_min == min_symmetric_witness(
                    set(product(A, A).elements), set(A.elements), pool, G.mul, G.inv
                )


# -- Ruzsa covering -------------------------------------------------------------


def test_ruzsa_cover_examples():
    c = ruzsa_cover(interval(3), interval(1))
    assert c.X == zset([-3, 0, 3]) and c.covered and verify_cover(c)
    e = identity_set(Z)
    c = ruzsa_cover(e, e)
    assert c.X == e
    B1, B2 = ball(F2, radius=1), ball(F2, radius=2)
    c = ruzsa_cover(B2, B1)
    assert c.ratio_bound == Fraction(53, 5)
    assert len(c.X) <= 10
    assert B2.issubset(product(c.X, B2))
    assert verify_cover(c)


def _cover_properties(c: CoverCertificate) -> None:
    S, T, X = c.S, c.T, c.X
    ctx = S.ctx
    assert X.issubset(S)
    translates = [{ctx.mul(x, t) for t in T} for x in X]
    assert sum(map(len, translates)) == len(set().union(*translates))
    TT = {ctx.mul(t, ctx.inv(u)) for t in T for u in T}
    assert all(any(ctx.mul(x, d) == s for x in X for d in TT) for s in S)
    assert len(X) * len(T) <= len({ctx.mul(s, t) for s in S for t in T})


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_ruzsa_cover_properties_random(seed):
    r = random.Random(seed)
    ctx = r.choice([Z, Z2, Heisenberg(), dihedral(5)])
    if ctx is Z:
        pick = lambda: (r.randint(-15, 15),)
    elif ctx is Z2:
        pick = lambda: (r.randint(-4, 4), r.randint(-4, 4))
    elif isinstance(ctx, Heisenberg):
        pick = lambda: (r.randint(-2, 2), r.randint(-2, 2), r.randint(-2, 2))
    else:
        pick = lambda: r.randrange(10)
    S = ElementSet(ctx, [pick() for _ in range(r.randint(1, 12))])
    T = ElementSet(ctx, [pick() for _ in range(r.randint(1, 6))])
    c = ruzsa_cover(S, T)
    assert c.covered and verify_cover(c)
    _cover_properties(c)


def test_cover_failure_detects_tampering():
    c = ruzsa_cover(interval(3), interval(1))
    bad = CoverCertificate(c.S, c.T, zset([-3, -2, 3]), c.product_size, True, True)
    assert cover_failure(bad)["condition"] == "translates x T pairwise disjoint"
    bad = CoverCertificate(c.S, c.T, zset([-3, 3]), c.product_size, True, True)
    assert cover_failure(bad)["condition"] == "S ⊆ X T T^-1"
    bad = CoverCertificate(c.S, c.T, zset([-3, 0, 9]), c.product_size, True, True)
    assert cover_failure(bad)["condition"] == "X ⊆ S"
    bad = CoverCertificate(c.S, c.T, c.X, c.product_size + 1, True, True)
    assert cover_failure(bad)["condition"] == "|S T| recorded correctly"


# -- subgroup control -----------------------------------------------------------


def test_subgroup_control_z_example():
    A = interval(8)
    H = subgroup_oracle(Z, "lattice:2")
    sc = subgroup_control(A, 2, H, (0,), 1)
    assert sc.B == zset(range(-16, 17, 2))
    assert sc.delta == Fraction(9, 17)
    assert len(sc.approx.X) <= 3
    assert verify_approx(sc.B, sc.approx.X, 16)
    assert sc.control.K == 2 * 2**6 / Fraction(9, 17)
    assert verify_control(A, sc.control)


def test_subgroup_control_absorbing_case():
    C12 = cyclic(12)
    A = ElementSet(C12, [0, 3, 6, 9])
    sc = subgroup_control(A, 1, subgroup_oracle(C12, "whole"), 0, 1)
    assert sc.B == A and sc.delta == 1
    assert sc.approx.X == identity_set(C12)
    assert sc.control.X == identity_set(C12)


def test_subgroup_control_free_ball():
    B2 = ball(F2, radius=2)
    H = subgroup_oracle(F2, "even-length")
    sc = subgroup_control(B2, 17, H, F2.identity(), 1, witness=B2)
    expected = power(B2, 2).filter(lambda w: F2.length(w) % 2 == 0)
    assert sc.B == expected
    assert verify_approx(sc.B, sc.approx.X, 2 * 17**3)
    assert verify_control(B2, sc.control)


def test_subgroup_control_errors():
    A = interval(3)
    with pytest.raises(PreconditionError):
        subgroup_control(A, 2, subgroup_oracle(Z, "trivial"), (100,), 1)
    with pytest.raises(PreconditionError):
        subgroup_control(A, 2, subgroup_oracle(Z, "whole"), (0,), 0)
    with pytest.raises(PreconditionError):
        subgroup_control(A, 2, subgroup_oracle(Z, "whole"), (0,), 1, witness=zset([-1, 0, 1]))
