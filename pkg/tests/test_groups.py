from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from approxgroups.errors import ElementError, GroupSpecError
from approxgroups.groups import (
    FiniteTable,
    FreeAbelian,
    FreeGroup,
    Heisenberg,
    MatrixGroup,
    group_from_spec,
    inv,
    mul,
)
from approxgroups.tables import cyclic, dihedral, named_table, small_groups
from reference import heis_matrix, matmul, reduce_letters

F2 = FreeGroup(2)
letters = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=14)


@given(letters, letters)
def test_free_mul_matches_stack_reduction(u, v):
    x, y = F2.from_letters(u), F2.from_letters(v)
    assert tuple(F2.letters(F2.mul(x, y))) == reduce_letters(u + v)


@given(letters)
def test_free_canonical_form_is_reduced(u):
    w = F2.letters(F2.from_letters(u))
    assert all(w[i] != -w[i + 1] for i in range(len(w) - 1))
    assert F2.canonical(F2.from_letters(u)) == F2.from_letters(u)


@given(letters, letters)
def test_free_length_subadditive(u, v):
    x, y = F2.from_letters(u), F2.from_letters(v)
    assert F2.length(F2.mul(x, y)) <= F2.length(x) + F2.length(y)


def test_free_examples():
    assert F2.mul(F2.word("a b"), F2.word("b⁻¹ a")) == F2.word("a a")
    assert F2.inv(F2.word("a b")) == F2.word("b^-1 a^-1")
    assert F2.format(F2.word("a a b^-1")) == "a^2 b^-1"
    assert F2.element_to_json(F2.word("a b^-1")) == [1, -2]


def test_free_large_power_is_compact():
    x = F2.power(F2.word("a"), 10**9)
    assert x == (1, 10**9)
    assert F2.length(F2.mul(x, F2.power(F2.word("a"), -10**9))) == 0


def test_free_rejects_bad_payloads():
    with pytest.raises(ElementError):
        F2.canonical((3, 1))
    with pytest.raises(ElementError):
        F2.from_letters([0])
    with pytest.raises(ElementError):
        F2.word("c")
    with pytest.raises(GroupSpecError):
        FreeGroup(0)


def test_matrix_examples():
    M = MatrixGroup(2)
    a, b = M.matrix([[1, 2], [0, 1]]), M.matrix([[1, 0], [2, 1]])
    assert M.rows(M.mul(a, b)) == [[5, 2], [2, 1]]
    assert M.rows(M.inv(a)) == [[1, -2], [0, 1]]
    q = M.matrix([[2, 1], [1, 1]])
    assert M.mul(q, M.inv(q)) == M.identity()
    h = M.matrix([[2, 0], [0, 1]])
    assert M.rows(M.inv(h)) == [[Fraction(1, 2), 0], [0, 1]]
    assert M.element_to_json(M.inv(h)) == ["1/2", "0/1", "0/1", "1/1"]


def test_matrix_rejects_singular():
    M = MatrixGroup(2)
    with pytest.raises(ElementError):
        M.matrix([[1, 2], [2, 4]])


def test_matrix_three_by_three_matches_numpy():
    M = MatrixGroup(3)
    rng = np.random.default_rng(0)
    for _ in range(200):
        a = rng.integers(-3, 4, size=(3, 3))
        b = rng.integers(-3, 4, size=(3, 3))
        if round(np.linalg.det(a)) == 0 or round(np.linalg.det(b)) == 0:
            continue
        got = M.rows(M.mul(M.matrix(a.tolist()), M.matrix(b.tolist())))
        assert got == (a @ b).tolist()


@given(st.tuples(*[st.integers(-20, 20)] * 3), st.tuples(*[st.integers(-20, 20)] * 3))
def test_heisenberg_matches_unitriangular_matrices(p, q):
    Hs = Heisenberg()
    r = Hs.mul(p, q)
    assert heis_matrix(r) == matmul(heis_matrix(p), heis_matrix(q))
    assert Hs.mul(p, Hs.inv(p)) == Hs.identity()


def test_heisenberg_example():
    assert Heisenberg().mul((1, 0, 0), (0, 1, 0)) == (1, 1, 1)


def test_table_inverse_by_row_scan():
    C6 = cyclic(6)
    e = C6.identity()
    row = C6.table[2] if hasattr(C6, "table") else None
    expected = next(j for j in range(6) if C6.mul(2, j) == e)
    assert C6.inv(2) == expected == 4
    if row is not None:
        assert list(row).index(e) == 4


def test_small_group_census():
    # groups of order 1..12 up to isomorphism: 1,1,1,2,1,2,1,5,2,2,1,5
    counts = {}
    for _, G in small_groups(12):
        counts[G.order] = counts.get(G.order, 0) + 1
    assert counts == {1: 1, 2: 1, 3: 1, 4: 2, 5: 1, 6: 2, 7: 1, 8: 5, 9: 2, 10: 2, 11: 1, 12: 5}


def test_table_validation_rejects_non_groups():
    with pytest.raises(GroupSpecError):
        FiniteTable([[0, 1], [1, 1]])
    with pytest.raises(GroupSpecError):
        FiniteTable([[0, 1, 2], [1, 0, 2], [2, 2, 0]])
    # latin square with identity that is not associative
    loop = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(GroupSpecError):
        FiniteTable(loop)


def _families():
    return [
        (F2, lambda r: F2.from_letters([r.choice([1, -1, 2, -2]) for _ in range(r.randint(0, 8))])),
        (FreeAbelian(2), lambda r: (r.randint(-9, 9), r.randint(-9, 9))),
        (Heisenberg(), lambda r: (r.randint(-9, 9), r.randint(-9, 9), r.randint(-9, 9))),
        (MatrixGroup(2), lambda r: _random_matrix(r)),
        (dihedral(6), lambda r: r.randrange(12)),
    ]


def _random_matrix(r):
    M = MatrixGroup(2)
    while True:
        rows = [[r.randint(-3, 3) for _ in range(2)] for _ in range(2)]
        if rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0] != 0:
            return M.matrix(rows)


@pytest.mark.parametrize("index", range(5))
def test_group_axioms_on_sampled_triples(index):
    ctx, sample = _families()[index]
    r = random.Random(index)
    e = ctx.identity()
    for _ in range(10_000):
        x, y, z = sample(r), sample(r), sample(r)
        assert ctx.mul(ctx.mul(x, y), z) == ctx.mul(x, ctx.mul(y, z))
        assert ctx.mul(x, e) == x == ctx.mul(e, x)
        assert ctx.mul(x, ctx.inv(x)) == e
        assert ctx.canonical(ctx.canonical(x)) == ctx.canonical(x)


@pytest.mark.parametrize("index", range(5))
def test_json_round_trip(index):
    ctx, sample = _families()[index]
    r = random.Random(100 + index)
    again = group_from_spec(ctx.spec())
    assert again == ctx
    for _ in range(200):
        x = sample(r)
        assert ctx.element_from_json(ctx.element_to_json(x)) == x


def test_group_specs():
    assert group_from_spec("free:2") == F2
    assert group_from_spec("z") == FreeAbelian(1)
    assert group_from_spec({"family": "heisenberg"}) == Heisenberg()
    assert named_table("quaternion").order == 8
    assert group_from_spec("dihedral:4").order == 8
    for bad in ["bogus", "free:x", {"family": "nope"}, 7]:
        with pytest.raises(GroupSpecError):
            group_from_spec(bad)


def test_checked_mul_rejects_foreign_elements():
    with pytest.raises(ElementError):
        mul(F2, (1, 1), (7, 1))
    with pytest.raises(ElementError):
        inv(FreeAbelian(2), (1, 2, 3))


def test_canonical_order_on_matrices():
    M = MatrixGroup(2)
    xs = [M.matrix([[1, 0], [0, 1]]), M.matrix([[Fraction(1, 2), 0], [0, 2]]), M.matrix([[-1, 0], [0, 1]])]
    ordered = sorted(xs, key=M.sort_key)
    # entries compare by (numerator, denominator), so 1/1 precedes 1/2
    assert [M.rows(x)[0][0] for x in ordered] == [-1, 1, Fraction(1, 2)]


@settings(max_examples=50)
@given(st.integers(-40, 40))
def test_power_matches_repeated_multiplication(n):
    for ctx, x in [(F2, F2.word("a b")), (Heisenberg(), (1, 2, 3)), (MatrixGroup(2), MatrixGroup(2).matrix([[1, 1], [0, 1]]))]:
        y = ctx.identity()
        step = x if n >= 0 else ctx.inv(x)
        for _ in range(abs(n)):
            y = ctx.mul(y, step)
        assert ctx.power(x, n) == y
