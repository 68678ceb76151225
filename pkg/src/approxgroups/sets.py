"""Finite element sets and product-set algebra."""

from __future__ import annotations

import contextlib
import os
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Iterable, Iterator

from ._freeprod import free_product
from .errors import BudgetExceeded, ContextMismatch, NotSymmetricError, PreconditionError
from .groups import Element, FreeGroup, Group

DEFAULT_BUDGET = 10**7
_budget = DEFAULT_BUDGET
_workers = 1

# below this many pairs the plain double loop wins
_STRUCTURED_MIN_PAIRS = 2_000_000
_PARALLEL_MIN_PAIRS = 1_000_000


def set_budget(n: int) -> None:
    global _budget
    _budget = int(n)


def get_budget() -> int:
    return _budget


def set_workers(n: int) -> None:
    """Default process count for large products; results do not depend on it."""
    global _workers
    _workers = max(1, int(n))


@contextlib.contextmanager
def budget(n: int):
    old = _budget
    set_budget(n)
    try:
        yield
    finally:
        set_budget(old)


def _check_budget(size: int, limit: int | None = None) -> None:
    limit = _budget if limit is None else limit
    if size > limit:
        raise BudgetExceeded(f"set size {size} exceeds element budget {limit}", size=size, budget=limit)


class ElementSet:
    """An immutable finite set of canonical elements of one group."""

    __slots__ = ("ctx", "_elems", "_sorted", "_symmetric")

    def __init__(self, ctx: Group, elements: Iterable = (), *, canonicalize: bool = False):
        self.ctx = ctx
        if canonicalize:
            elements = (ctx.canonical(x) for x in elements)
        self._elems = elements if isinstance(elements, frozenset) else frozenset(elements)
        _check_budget(len(self._elems))
        self._sorted = None
        self._symmetric = None

    @property
    def elements(self) -> frozenset:
        return self._elems

    def __len__(self) -> int:
        return len(self._elems)

    def __contains__(self, x) -> bool:
        return x in self._elems

    def __iter__(self) -> Iterator[Element]:
        return iter(self.sorted())

    def __eq__(self, other) -> bool:
        if not isinstance(other, ElementSet):
            return NotImplemented
        return self.ctx == other.ctx and self._elems == other._elems

    def __hash__(self) -> int:
        return hash(self._elems)

    def __repr__(self) -> str:
        shown = ", ".join(self.ctx.format(x) for x in self.sorted()[:8])
        more = ", ..." if len(self) > 8 else ""
        return f"ElementSet({self.ctx.family}, {len(self)}: {{{shown}{more}}})"

    def sorted(self) -> tuple:
        """Elements in canonical order (cached)."""
        if self._sorted is None:
            key = None if self.ctx.natural_order else self.ctx.sort_key
            self._sorted = tuple(sorted(self._elems, key=key))
        return self._sorted

    @property
    def is_symmetric(self) -> bool:
        if self._symmetric is None:
            inv = self.ctx.inv
            self._symmetric = all(inv(x) in self._elems for x in self._elems)
        return self._symmetric

    @property
    def contains_identity(self) -> bool:
        return self.ctx.identity() in self._elems

    def require_symmetric(self, name: str = "set") -> None:
        if not self.contains_identity:
            raise NotSymmetricError(f"{name} does not contain the identity")
        if not self.is_symmetric:
            inv = self.ctx.inv
            bad = min((x for x in self._elems if inv(x) not in self._elems), key=self.ctx.sort_key)
            raise NotSymmetricError(
                f"{name} is not symmetric: inverse of {self.ctx.format(bad)} missing",
                element=self.ctx.element_to_json(bad),
            )

    def _same(self, other: "ElementSet") -> None:
        if self.ctx != other.ctx:
            raise ContextMismatch("element sets live in different groups")

    def issubset(self, other: "ElementSet") -> bool:
        self._same(other)
        return self._elems <= other._elems

    def missing_from(self, other: "ElementSet") -> Element | None:
        """Canonically smallest element of ``self`` not in ``other``, if any."""
        self._same(other)
        diff = self._elems - other._elems
        return min(diff, key=self.ctx.sort_key) if diff else None

    def __or__(self, other: "ElementSet") -> "ElementSet":
        self._same(other)
        return ElementSet(self.ctx, self._elems | other._elems)

    def __and__(self, other: "ElementSet") -> "ElementSet":
        self._same(other)
        return ElementSet(self.ctx, self._elems & other._elems)

    def __sub__(self, other: "ElementSet") -> "ElementSet":
        self._same(other)
        return ElementSet(self.ctx, self._elems - other._elems)

    def inverse(self) -> "ElementSet":
        inv = self.ctx.inv
        return ElementSet(self.ctx, frozenset(inv(x) for x in self._elems))

    def min(self) -> Element:
        return min(self._elems, key=self.ctx.sort_key)

    def filter(self, pred) -> "ElementSet":
        return ElementSet(self.ctx, frozenset(x for x in self._elems if pred(x)))


def singleton(ctx: Group, x: Element) -> ElementSet:
    return ElementSet(ctx, (x,))


def identity_set(ctx: Group) -> ElementSet:
    return ElementSet(ctx, (ctx.identity(),))


# -- products ----------------------------------------------------------------


def _naive_product(ctx: Group, S: Iterable, T: tuple, limit: int) -> set:
    mul = ctx.mul
    out: set = set()
    for s in S:
        out.update([mul(s, t) for t in T])
        if len(out) > limit:
            _check_budget(len(out), limit)
    return out


def _kernel(ctx: Group, S: tuple, T: tuple, limit: int) -> set:
    if isinstance(ctx, FreeGroup) and len(S) * len(T) >= _STRUCTURED_MIN_PAIRS:
        return free_product(S, T, lambda n: _check_budget(n, limit))
    return _naive_product(ctx, S, T, limit)


def _chunk(args) -> frozenset:
    ctx, S, T, limit = args
    return frozenset(_kernel(ctx, S, T, limit))


def default_workers() -> int:
    return os.cpu_count() or 1


def product(S: ElementSet, T: ElementSet, *, workers: int | None = None) -> ElementSet:
    """The product set ``{s t : s in S, t in T}``.

    The result depends only on the inputs: ``workers > 1`` splits ``S`` into
    chunks evaluated in worker processes and unions the chunk results.
    """
    S._same(T)
    ctx = S.ctx
    limit = _budget
    workers = _workers if workers is None else workers
    s_elems, t_elems = tuple(S.elements), tuple(T.elements)
    if workers > 1 and len(s_elems) * len(t_elems) >= _PARALLEL_MIN_PAIRS and len(s_elems) > 1:
        s_sorted = S.sorted()
        n = min(workers, len(s_sorted))
        chunks = [(ctx, s_sorted[i::n], t_elems, limit) for i in range(n)]
        out: set = set()
        with ProcessPoolExecutor(max_workers=n) as pool:
            for part in pool.map(_chunk, chunks):
                out |= part
                _check_budget(len(out), limit)
        return ElementSet(ctx, frozenset(out))
    return ElementSet(ctx, frozenset(_kernel(ctx, s_elems, t_elems, limit)))


def power(S: ElementSet, k: int, *, workers: int | None = None) -> ElementSet:
    """``S^k`` by iterated product; stops early once the powers stabilise."""
    if k < 1:
        raise PreconditionError(f"power exponent must be >= 1, got {k}", k=k)
    P = S
    for _ in range(k - 1):
        nxt = product(P, S, workers=workers)
        if nxt == P:
            break
        P = nxt
    return P


def powers(S: ElementSet, k: int) -> list[ElementSet]:
    """``[S^1, ..., S^k]``."""
    out = [S]
    for _ in range(k - 1):
        out.append(out[-1] if len(out) > 1 and out[-1] == out[-2] else product(out[-1], S))
    return out


def symmetrize(S: ElementSet) -> ElementSet:
    inv = S.ctx.inv
    elems = set(S.elements)
    elems.update(inv(x) for x in S.elements)
    elems.add(S.ctx.identity())
    return ElementSet(S.ctx, frozenset(elems))


def intersect_coset(S: ElementSet, H, x: Element) -> ElementSet:
    """``S`` intersected with the right coset ``H x``: all ``s`` with ``s x^-1`` in ``H``."""
    ctx = S.ctx
    xi = ctx.inv(x)
    return S.filter(lambda s: H.contains(ctx.mul(s, xi)))


def doubling(S: ElementSet) -> Fraction:
    if not len(S):
        raise PreconditionError("doubling of the empty set")
    return Fraction(len(product(S, S)), len(S))


def ball(ctx: Group, gens: ElementSet | Iterable | None = None, radius: int = 1) -> ElementSet:
    """All products of at most ``radius`` generators; ``gens`` must be symmetric with identity."""
    if radius < 0:
        raise PreconditionError(f"ball radius must be >= 0, got {radius}", radius=radius)
    if gens is None:
        gens = ElementSet(ctx, ctx.standard_generators())
    elif not isinstance(gens, ElementSet):
        gens = ElementSet(ctx, gens, canonicalize=True)
    gens.require_symmetric("generating set")
    mul = ctx.mul
    g = tuple(x for x in gens.elements if x != ctx.identity())
    seen = {ctx.identity()}
    frontier = [ctx.identity()]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for h in g:
                v = mul(w, h)
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        _check_budget(len(seen))
        if not nxt:
            break
        frontier = nxt
    return ElementSet(ctx, frozenset(seen))
