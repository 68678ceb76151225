"""Named subgroup membership oracles.

Which subgroup to intersect with is an input to the control constructions,
so every oracle has a string name that round-trips through JSON:

=====================  =========================================================
``whole``, ``trivial``  any family
``even-length``         free groups: words of even length (index 2)
``lattice:q``           free abelian: ``q Z^d`` (alias ``even-lattice:q``)
``center``              Heisenberg: ``x = y = 0``
``congruence:q``        Heisenberg: ``x = y = 0 mod q``
``upper-triangular``    matrix groups: zero below the diagonal
``det-one``             matrix groups: determinant 1
``subset:i,j,...``      finite tables: an explicit subset, validated as a subgroup
``cyclic:g``            finite tables: the cyclic subgroup generated by index ``g``
=====================  =========================================================
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .errors import GroupSpecError
from .groups import FiniteTable, FreeAbelian, FreeGroup, Group, Heisenberg, MatrixGroup


@dataclass(frozen=True)
class SubgroupOracle:
    ctx: Group
    name: str
    predicate: Callable = field(compare=False, repr=False)

    def contains(self, x) -> bool:
        return self.predicate(x)

    __contains__ = contains


def _table_subset(ctx: FiniteTable, members: frozenset, name: str) -> SubgroupOracle:
    e = ctx.identity()
    if e not in members:
        raise GroupSpecError(f"subgroup {name!r} does not contain the identity")
    for a in members:
        if ctx.inv(a) not in members:
            raise GroupSpecError(f"subgroup {name!r} is not closed under inverses", element=a)
        for b in members:
            if ctx.mul(a, b) not in members:
                raise GroupSpecError(f"subgroup {name!r} is not closed", pair=[a, b])
    return SubgroupOracle(ctx, name, members.__contains__)


def subgroup_oracle(ctx: Group, name: str) -> SubgroupOracle:
    kind, _, arg = name.partition(":")
    if kind == "whole":
        return SubgroupOracle(ctx, name, lambda x: True)
    if kind == "trivial":
        e = ctx.identity()
        return SubgroupOracle(ctx, name, lambda x: x == e)
    try:
        if isinstance(ctx, FreeGroup) and kind == "even-length":
            return SubgroupOracle(ctx, name, lambda x: sum(x[1::2]) % 2 == 0)
        if isinstance(ctx, FreeAbelian) and kind in ("lattice", "even-lattice"):
            q = int(arg)
            if q < 1:
                raise GroupSpecError("lattice modulus must be >= 1")
            return SubgroupOracle(ctx, name, lambda x: all(c % q == 0 for c in x))
        if isinstance(ctx, Heisenberg) and kind == "center":
            return SubgroupOracle(ctx, name, lambda x: x[0] == 0 and x[1] == 0)
        if isinstance(ctx, Heisenberg) and kind == "congruence":
            q = int(arg)
            if q < 1:
                raise GroupSpecError("congruence modulus must be >= 1")
            return SubgroupOracle(ctx, name, lambda x: x[0] % q == 0 and x[1] % q == 0)
        if isinstance(ctx, MatrixGroup) and kind == "upper-triangular":
            n = ctx.n
            below = [i * n + j for i in range(n) for j in range(i)]
            return SubgroupOracle(ctx, name, lambda x: all(x[k] == 0 for k in below))
        if isinstance(ctx, MatrixGroup) and kind == "det-one":
            return SubgroupOracle(ctx, name, lambda x: ctx.determinant(x) == 1)
        if isinstance(ctx, FiniteTable) and kind == "subset":
            members = frozenset(int(v) for v in arg.split(",") if v.strip())
            return _table_subset(ctx, members, name)
        if isinstance(ctx, FiniteTable) and kind == "cyclic":
            g = ctx.canonical(int(arg))
            members = {ctx.identity()}
            x = g
            while x not in members:
                members.add(x)
                x = ctx.mul(x, g)
            return _table_subset(ctx, frozenset(members), name)
    except GroupSpecError:
        raise
    except ValueError as exc:
        raise GroupSpecError(f"bad subgroup spec {name!r}") from exc
    raise GroupSpecError(f"no subgroup oracle {name!r} for the {ctx.family} family")


def builtin_oracles(ctx: Group) -> list[SubgroupOracle]:
    """The proper named subgroups tried by searches that do not take ``H`` as input."""
    if isinstance(ctx, FreeGroup):
        names = ["even-length"]
    elif isinstance(ctx, FreeAbelian):
        names = ["lattice:2", "lattice:3"]
    elif isinstance(ctx, Heisenberg):
        names = ["center", "congruence:2"]
    elif isinstance(ctx, MatrixGroup):
        names = ["upper-triangular", "det-one"]
    elif isinstance(ctx, FiniteTable):
        names = [f"cyclic:{g}" for g in range(ctx.order)]
    else:
        names = []
    return [subgroup_oracle(ctx, n) for n in names]
