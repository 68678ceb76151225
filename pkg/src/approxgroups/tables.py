"""Constructors for small finite groups as validated multiplication tables."""

from __future__ import annotations

import itertools
from typing import Callable, Hashable, Sequence

from .errors import GroupSpecError
from .groups import FiniteTable


def table_from_elements(elements: Sequence[Hashable], mul: Callable) -> FiniteTable:
    index = {g: i for i, g in enumerate(elements)}
    return FiniteTable(tuple(tuple(index[mul(g, h)] for h in elements) for g in elements))


def cyclic(n: int) -> FiniteTable:
    return FiniteTable(tuple(tuple((i + j) % n for j in range(n)) for i in range(n)))


def abelian(*orders: int) -> FiniteTable:
    elems = list(itertools.product(*(range(n) for n in orders)))
    return table_from_elements(
        elems, lambda g, h: tuple((a + b) % n for a, b, n in zip(g, h, orders))
    )


def dihedral(n: int) -> FiniteTable:
    """Symmetries of the regular n-gon (order 2n); element (k, f) is r^k s^f."""
    elems = [(k, f) for f in (0, 1) for k in range(n)]
    return table_from_elements(
        elems, lambda g, h: ((g[0] + (-1) ** g[1] * h[0]) % n, g[1] ^ h[1])
    )


def dicyclic(n: int) -> FiniteTable:
    """Dic_n of order 4n: a^{2n} = 1, x^2 = a^n, x a x^-1 = a^-1.  Dic_2 is Q8."""

    def mul(g, h):
        k, f = g
        l, e = h
        k = (k + (-1) ** f * l) % (2 * n)
        if f and e:
            return ((k + n) % (2 * n), 0)
        return (k, f ^ e)

    return table_from_elements([(k, f) for f in (0, 1) for k in range(2 * n)], mul)


def permutation_group(gens: Sequence[Sequence[int]]) -> FiniteTable:
    size = len(gens[0])
    ident = tuple(range(size))

    def compose(p, q):  # apply q first, then p
        return tuple(p[q[i]] for i in range(size))

    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = compose(tuple(g), p)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return table_from_elements(sorted(seen), compose)


def alternating4() -> FiniteTable:
    return permutation_group([(1, 2, 0, 3), (1, 0, 3, 2)])


def small_groups(max_order: int = 12) -> list[tuple[str, FiniteTable]]:
    """One representative of every isomorphism class of order <= 12."""
    if max_order > 12:
        raise GroupSpecError("small_groups only knows orders up to 12")
    groups = [
        ("C1", cyclic(1)), ("C2", cyclic(2)), ("C3", cyclic(3)),
        ("C4", cyclic(4)), ("C2xC2", abelian(2, 2)), ("C5", cyclic(5)),
        ("C6", cyclic(6)), ("S3", dihedral(3)), ("C7", cyclic(7)),
        ("C8", cyclic(8)), ("C4xC2", abelian(4, 2)), ("C2xC2xC2", abelian(2, 2, 2)),
        ("D4", dihedral(4)), ("Q8", dicyclic(2)), ("C9", cyclic(9)),
        ("C3xC3", abelian(3, 3)), ("C10", cyclic(10)), ("D5", dihedral(5)),
        ("C11", cyclic(11)), ("C12", cyclic(12)), ("C2xC6", abelian(2, 6)),
        ("D6", dihedral(6)), ("A4", alternating4()), ("Dic3", dicyclic(3)),
    ]
    return [(name, g) for name, g in groups if g.order <= max_order]


def named_table(spec: str) -> FiniteTable:
    """``cyclic:n``, ``dihedral:n``, ``dicyclic:n``, ``quaternion``, ``a4``, ``abelian-table:2,6``."""
    name, _, arg = spec.partition(":")
    try:
        if name == "cyclic":
            return cyclic(int(arg))
        if name == "dihedral":
            return dihedral(int(arg))
        if name == "dicyclic":
            return dicyclic(int(arg))
        if name == "quaternion":
            return dicyclic(2)
        if name == "a4":
            return alternating4()
        if name == "abelian-table":
            return abelian(*(int(v) for v in arg.split(",")))
    except ValueError as exc:
        raise GroupSpecError(f"bad group spec {spec!r}") from exc
    raise GroupSpecError(f"unknown group spec {spec!r}")
