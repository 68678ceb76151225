"""Expansion measurements and the pigeonhole nesting construction."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import CertificateError, PreconditionError
from .groups import FiniteTable, Group
from .oracles import builtin_oracles
from .sets import ElementSet, ball, identity_set, power, product, symmetrize

DEFAULT_EPSILON = Fraction(1, 10)
DEFAULT_M = 2
VON_NEUMANN = Fraction(5, 4)


@dataclass(frozen=True)
class ExpansionReport:
    A_size: int
    AX_size: int
    ratio: Fraction
    X_description: str = ""


def expansion_ratio(A: ElementSet, X: ElementSet, description: str = "") -> ExpansionReport:
    if not len(A):
        raise PreconditionError("expansion ratio of the empty set")
    n = len(product(A, X))
    return ExpansionReport(len(A), n, Fraction(n, len(A)), description)


def check_von_neumann(A: ElementSet, X: ElementSet) -> bool:
    """``|A X| >= 5/4 |A|``, the expansion forced when ``X`` contains a free pair."""
    if not X.contains_identity:
        raise PreconditionError("test set X must contain the identity")
    return 4 * len(product(A, X)) >= 5 * len(A)


# -- samplers -----------------------------------------------------------------


class BallSampler:
    """Trial ``i`` yields the standard-generator ball of radius ``i mod (max_radius + 1)``."""

    def __init__(self, max_radius: int):
        self.max_radius = max_radius
        self._cache: dict = {}

    def __call__(self, ctx: Group, rng: random.Random, i: int) -> ElementSet:
        r = i % (self.max_radius + 1)
        key = (ctx, r)
        if key not in self._cache:
            self._cache[key] = ball(ctx, radius=r)
        return self._cache[key]

    def describe(self) -> str:
        return f"balls:{self.max_radius}"


class SubsetSampler:
    """Random symmetric subsets of a ball, of size at most ``max_size``."""

    def __init__(self, radius: int, max_size: int):
        self.radius, self.max_size = radius, max_size
        self._pool = None

    def __call__(self, ctx: Group, rng: random.Random, i: int) -> ElementSet:
        if self._pool is None or self._pool[0] != ctx:
            self._pool = (ctx, ball(ctx, radius=self.radius).sorted())
        pool = self._pool[1]
        n = rng.randint(1, min(self.max_size, len(pool)))
        return symmetrize(ElementSet(ctx, rng.sample(pool, n)))

    def describe(self) -> str:
        return f"subsets:{self.radius}:{self.max_size}"


class CosetSampler:
    """Unions of random left translates of a cyclic piece ``{g^i : |i| <= length}``.

    In finite tables the piece is the whole cyclic subgroup, so samples are
    unions of cosets.
    """

    def __init__(self, radius: int, count: int, length: int = 4):
        self.radius, self.count, self.length = radius, count, length

    def __call__(self, ctx: Group, rng: random.Random, i: int) -> ElementSet:
        pool = ball(ctx, radius=self.radius).sorted()
        g = rng.choice(pool)
        length = ctx.order if isinstance(ctx, FiniteTable) else self.length
        piece = {ctx.power(g, j) for j in range(-length, length + 1)}
        out = set()
        for _ in range(rng.randint(1, self.count)):
            h = rng.choice(pool)
            out.update(ctx.mul(h, p) for p in piece)
        return ElementSet(ctx, out)

    def describe(self) -> str:
        return f"cosets:{self.radius}:{self.count}"


def parse_sampler(spec: str):
    kind, _, rest = spec.partition(":")
    args = [int(v) for v in rest.split(":") if v]
    try:
        if kind == "balls":
            return BallSampler(*args)
        if kind == "subsets":
            return SubsetSampler(*args)
        if kind == "cosets":
            return CosetSampler(*args)
    except TypeError as exc:
        raise PreconditionError(f"bad sampler spec {spec!r}") from exc
    raise PreconditionError(f"unknown sampler {spec!r}")


def kappa_probe(ctx: Group, X: ElementSet, sampler, trials: int, seed: int = 0) -> Fraction:
    """``min |A X| / |A| - 1`` over sampled sets ``A``.

    An empirical upper bound on the uniform expansion constant of ``X``; it
    certifies nothing about nonamenability.
    """
    if trials < 1:
        raise PreconditionError("kappa_probe needs at least one trial")
    rng = random.Random(seed)
    best = None
    for i in range(trials):
        A = sampler(ctx, rng, i)
        r = Fraction(len(product(A, X)), len(A)) - 1
        if best is None or r < best:
            best = r
    return best


# -- pigeonhole nesting -------------------------------------------------------


def nesting_levels(epsilon, K) -> int:
    """Smallest ``k >= 1`` with ``(1 + epsilon)^k >= K^4``, by exact rational powering."""
    epsilon, K = Fraction(epsilon), Fraction(K)
    if epsilon <= 0:
        raise PreconditionError("epsilon must be positive")
    base, target = 1 + epsilon, K**4
    if target <= base:
        return 1
    k = max(1, math.ceil(math.log(target) / math.log(base)))
    while base**k < target:
        k += 1
    while k > 1 and base ** (k - 1) >= target:
        k -= 1
    return k


@dataclass(frozen=True)
class NestingResult:
    j: int
    A_prime: ElementSet
    epsilon: Fraction
    k: int
    certified: bool
    m: int
    A_prime_Bm_size: int
    level_sizes: tuple[int, ...] = field(default=())
    core_in_A4: bool = True
    core_power_in_A4: bool = True


def core_power_failure(A4: ElementSet, B: ElementSet, n: int) -> dict | None:
    """First failure of ``B^n ⊆ A^4``, checked one power at a time."""
    P = B
    for i in range(1, n + 1):
        if i > 1:
            nxt = product(P, B)
            if nxt == P:
                break
            P = nxt
        missing = P.missing_from(A4)
        if missing is not None:
            return {
                "condition": f"B^{n} ⊆ A^4",
                "power": i,
                "missing": B.ctx.element_to_json(missing),
            }
    return None


def pigeonhole_nesting(
    A: ElementSet, B: ElementSet, m: int = DEFAULT_M, epsilon=DEFAULT_EPSILON, K=2
) -> NestingResult:
    """Find the first level ``j`` of ``A ⊆ A B^m ⊆ ... ⊆ A B^(km) ⊆ A^5`` that grows by at most ``1 + epsilon``.

    Requires ``B^(km) ⊆ A^4`` and ``|A^5| <= K^4 |A|``; then one of the ``k``
    steps must be small, so failing to find one raises ``CertificateError``.
    """
    epsilon, K = Fraction(epsilon), Fraction(K)
    A._same(B)
    B.require_symmetric("B")
    if m < 1:
        raise PreconditionError(f"m must be >= 1, got {m}", m=m)
    k = nesting_levels(epsilon, K)
    A4 = power(A, 4)
    A5 = product(A4, A)
    if len(A5) > K**4 * len(A):
        raise PreconditionError(
            "|A^5| <= K^4 |A| fails", condition="|A^5| <= K^4 |A|", lhs=len(A5), rhs=str(K**4 * len(A))
        )
    missing = B.missing_from(A4)
    if missing is not None:
        raise PreconditionError(
            "B ⊆ A^4 fails", condition="B ⊆ A^4", missing=A.ctx.element_to_json(missing)
        )
    failure = core_power_failure(A4, B, k * m)
    if failure is not None:
        raise PreconditionError(f"B^{k * m} ⊆ A^4 fails", **failure)

    Bm = power(B, m)
    cur = A
    sizes = [len(A)]
    for j in range(k):
        nxt = product(cur, Bm)
        sizes.append(len(nxt))
        if len(nxt) <= (1 + epsilon) * len(cur):
            if not (A.issubset(cur) and cur.issubset(A5)):
                raise CertificateError("nesting level escaped A ⊆ A' ⊆ A^5")
            return NestingResult(j, cur, epsilon, k, True, m, len(nxt), tuple(sizes))
        cur = nxt
    raise CertificateError(
        "no nesting level grows by at most 1 + epsilon", k=k, level_sizes=sizes
    )


# -- core-set search ----------------------------------------------------------


def _sym_norm(ctx: Group, x) -> object:
    return max(ctx.norm(x), ctx.norm(ctx.inv(x)))


def is_sanders_core(A: ElementSet, B: ElementSet, m: int, k: int) -> bool:
    """``B`` symmetric, contains the identity, and ``B^(km) ⊆ A^4``."""
    if not (B.contains_identity and B.is_symmetric):
        return False
    return core_power_failure(power(A, 4), B, k * m) is None


def sanders_core_search(A: ElementSet, m: int, k: int, budget: int = 64) -> ElementSet | None:
    """Bounded search for a large symmetric ``B`` containing the identity with ``B^(km) ⊆ A^4``.

    Candidates: truncated cyclic pieces ``{g^i : |i| <= r}`` for ``g`` in ``A``;
    and ``A``, ``A^2`` and ``A^2 ∩ H`` for the built-in subgroups ``H``, each
    pruned to the largest norm threshold that passes (monotone, so found by
    bisection).  ``budget`` caps the number of full power checks.  Returns the
    largest passing candidate; the trivial set ``{e}`` always passes, so
    ``None`` only comes back when ``budget < 1``.
    """
    if budget < 1:
        return None
    ctx = A.ctx
    km = k * m
    A4 = power(A, 4)
    a4 = A4.elements
    e = ctx.identity()
    spent = 0
    best = identity_set(ctx)

    def passes(C: ElementSet) -> bool:
        nonlocal spent
        spent += 1
        return core_power_failure(A4, C, km) is None

    def consider(C: ElementSet) -> None:
        nonlocal best
        if len(C) > len(best):
            best = C

    for g in A.sorted():
        if g == e:
            continue
        if spent >= budget:
            break
        # largest i with g^j in A^4 for all |j| <= i
        x, xi, i = g, ctx.inv(g), 0
        torsion = False
        while x in a4 and xi in a4:
            i += 1
            if x == e:
                torsion = True
                break
            x, xi = ctx.mul(x, g), ctx.mul(xi, ctx.inv(g))
            if i > len(a4):
                break
        if torsion:
            piece = {ctx.power(g, j) for j in range(i + 1)}
        else:
            r = i // km
            if r < 1:
                continue
            piece = {ctx.power(g, j) for j in range(-r, r + 1)}
        C = ElementSet(ctx, piece)
        if len(C) > len(best) and passes(C):
            consider(C)

    A2 = product(A, A)
    starts = [A, A2] + [A2.filter(H.contains) for H in builtin_oracles(ctx)]
    for C0 in starts:
        if spent >= budget:
            break
        C0 = C0.filter(lambda c: c in a4) | identity_set(ctx)
        C0 = C0.filter(lambda c: ctx.inv(c) in C0)
        if len(C0) <= len(best):
            continue
        norms = sorted({_sym_norm(ctx, c) for c in C0.elements})
        cut = lambda t: C0.filter(lambda c: _sym_norm(ctx, c) <= t)
        lo, hi = -1, len(norms) - 1  # cut(norms[lo]) passes; lo = -1 means only {e}
        if passes(C0):
            lo = hi
        while lo < hi and spent < budget:
            mid = (lo + hi + 1) // 2
            if passes(cut(norms[mid])):
                lo = mid
            else:
                hi = mid - 1
        if lo >= 0:
            C = cut(norms[lo]) | identity_set(ctx)
            if is_sanders_core(A, C, m, k):
                consider(C)
    return best
