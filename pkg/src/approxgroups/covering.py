"""Approximate-group witnesses, control, and covering constructions.

A symmetric set ``A`` containing the identity is a K-approximate group when
some symmetric ``X`` with ``|X| <= K`` has ``A^2 ⊆ A X``.  ``B`` K-controls
``A`` when ``|B| <= K |A|`` and one set ``X`` with ``|X| <= K`` gives
``A ⊆ B X ∩ X B``.  Every bound here is an exact ``Fraction``.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .errors import CertificateError, PreconditionError
from .oracles import SubgroupOracle
from .sets import ElementSet, intersect_coset, power, product

# exhaustive witness search runs when the candidate pool has at most this
# many inverse classes, over combinations of at most _EXHAUSTIVE_CHOOSE classes
_EXHAUSTIVE_POOL = 20
_EXHAUSTIVE_CHOOSE = 5


@dataclass(frozen=True)
class ApproxWitness:
    X: ElementSet
    K: Fraction
    verified: bool
    greedy_size: int | None = None
    exact_min: int | None = None
    # 2 H(d) * exact_min: the greedy guarantee; compare with greedy_size
    approx_bound: Fraction | None = None


@dataclass(frozen=True)
class ControlWitness:
    B: ElementSet
    X: ElementSet
    K: Fraction


@dataclass(frozen=True)
class CoverCertificate:
    S: ElementSet
    T: ElementSet
    X: ElementSet
    product_size: int
    covered: bool
    disjointness_checked: bool

    @property
    def ratio_bound(self) -> Fraction:
        return Fraction(self.product_size, len(self.T))


@dataclass(frozen=True)
class SubgroupControl:
    B: ElementSet
    approx: ApproxWitness
    control: ControlWitness
    delta: Fraction
    k: int
    cover: CoverCertificate
    # R with B^2 ⊆ B R; R ∪ R^-1 is the witness the construction guarantees
    reps: ElementSet = field(repr=False)


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _elem(S: ElementSet, x) -> Any:
    return S.ctx.element_to_json(x)


# -- verification -------------------------------------------------------------


def approx_failure(A: ElementSet, X: ElementSet, K) -> dict | None:
    """``None`` when ``X`` witnesses that ``A`` is K-approximate, else the first failing condition."""
    K = _q(K)
    A._same(X)
    inv = X.ctx.inv
    bad = [x for x in X.elements if inv(x) not in X.elements]
    if bad:
        x = min(bad, key=X.ctx.sort_key)
        return {"condition": "X symmetric", "element": _elem(X, x)}
    if len(X) > K:
        return {"condition": "|X| <= K", "lhs": len(X), "rhs": str(K)}
    missing = product(A, A).missing_from(product(A, X))
    if missing is not None:
        return {"condition": "A^2 ⊆ A X", "missing": _elem(A, missing)}
    return None


def verify_approx(A: ElementSet, X: ElementSet, K) -> bool:
    A.require_symmetric("A")
    return approx_failure(A, X, K) is None


def control_failure(A: ElementSet, w: ControlWitness) -> dict | None:
    K = _q(w.K)
    if len(w.B) > K * len(A):
        return {"condition": "|B| <= K |A|", "lhs": len(w.B), "rhs": str(K * len(A))}
    if len(w.X) > K:
        return {"condition": "|X| <= K", "lhs": len(w.X), "rhs": str(K)}
    missing = A.missing_from(product(w.B, w.X))
    if missing is not None:
        return {"condition": "A ⊆ B X", "missing": _elem(A, missing)}
    missing = A.missing_from(product(w.X, w.B))
    if missing is not None:
        return {"condition": "A ⊆ X B", "missing": _elem(A, missing)}
    return None


def verify_control(A: ElementSet, w: ControlWitness) -> bool:
    A._same(w.B)
    return control_failure(A, w) is None


# -- witness search -----------------------------------------------------------


def _inverse_classes(pool: ElementSet) -> list[tuple]:
    """``{x, x^-1}`` classes of a pool, each sorted, listed in canonical order."""
    ctx = pool.ctx
    seen = set()
    classes = []
    for x in pool.sorted():
        if x in seen:
            continue
        xi = ctx.inv(x)
        cls = (x,) if xi == x else tuple(sorted((x, xi), key=ctx.sort_key))
        seen.update(cls)
        classes.append(cls)
    return classes


def _harmonic(d: int) -> Fraction:
    return sum((Fraction(1, i) for i in range(1, d + 1)), Fraction(0))


def find_witness(A: ElementSet, K_max, pool: ElementSet | None = None) -> ApproxWitness | None:
    """Greedy symmetric witness search; ``None`` if greedy needs more than ``K_max`` elements.

    Candidates are taken in inverse pairs from ``pool`` (default ``A^2``).  Each
    step adds the pair covering the most still-uncovered elements of ``A^2``,
    ties going to the canonically smallest pair.  Small pools are also searched
    exhaustively so the result can report the true minimum alongside.
    """
    A.require_symmetric("A")
    K_max = _q(K_max)
    ctx = A.ctx
    AA = product(A, A)
    if pool is None:
        pool = AA
    pool = pool | pool.inverse()
    classes = _inverse_classes(pool)
    mul = ctx.mul
    a_elems = A.elements
    aa = AA.elements
    covers = [frozenset(y for x in cls for a in a_elems if (y := mul(a, x)) in aa) for cls in classes]

    uncovered = set(aa)
    chosen: list[int] = []
    # lazy greedy: stored counts only shrink, so a popped entry whose recomputed
    # count still sorts first is the true (count, canonical order) maximum
    heap = [(-len(c), i) for i, c in enumerate(covers)]
    heapq.heapify(heap)
    while uncovered and heap:
        neg, i = heapq.heappop(heap)
        fresh = len(covers[i] & uncovered)
        if fresh == 0:
            continue
        if heap and (-fresh, i) > heap[0]:
            heapq.heappush(heap, (-fresh, i))
            continue
        chosen.append(i)
        uncovered -= covers[i]
    size = sum(len(classes[i]) for i in chosen)
    if uncovered or size > K_max:
        return None
    X = ElementSet(ctx, frozenset(x for i in chosen for x in classes[i]))

    exact_min = bound = None
    if len(classes) <= _EXHAUSTIVE_POOL:
        exact_min = _exhaustive_min(classes, covers, aa, size, _EXHAUSTIVE_CHOOSE)
        if exact_min is not None:
            d = max((len(c) for c in covers), default=1)
            bound = 2 * _harmonic(d) * exact_min
    verified = approx_failure(A, X, K_max) is None
    if not verified:
        raise CertificateError("greedy witness failed verification")
    return ApproxWitness(X, K_max, True, size, exact_min, bound)


def _exhaustive_min(classes, covers, universe, upper: int, max_choose: int) -> int | None:
    """Minimum witness size, or ``None`` when it cannot be certified within ``max_choose`` classes."""
    index = {y: i for i, y in enumerate(universe)}
    full = (1 << len(index)) - 1
    masks = [sum(1 << index[y] for y in c) for c in covers]
    sizes = [len(c) for c in classes]
    best = upper
    for r in range(1, max_choose + 1):
        if r > best:
            break
        for combo in itertools.combinations(range(len(classes)), r):
            s = sum(sizes[i] for i in combo)
            if s >= best:
                continue
            m = 0
            for i in combo:
                m |= masks[i]
            if m == full:
                best = s
    # any cover with more than max_choose classes has more than max_choose elements
    return best if best <= max_choose + 1 or len(classes) <= max_choose else None


def minimal_witness(A: ElementSet, pool: ElementSet | None = None) -> ElementSet | None:
    """A minimum-cardinality symmetric witness drawn from ``pool`` (default ``A^3``), by brute force."""
    A.require_symmetric("A")
    ctx = A.ctx
    AA = product(A, A)
    if pool is None:
        pool = product(AA, A)
    classes = _inverse_classes(pool | pool.inverse())
    mul = ctx.mul
    aa = AA.elements
    covers = [frozenset(y for x in cls for a in A.elements if (y := mul(a, x)) in aa) for cls in classes]
    index = {y: i for i, y in enumerate(aa)}
    full = (1 << len(index)) - 1
    masks = [sum(1 << index[y] for y in c) for c in covers]
    best = None
    for r in range(1, len(classes) + 1):
        if best is not None and r > len(best):
            break
        for combo in itertools.combinations(range(len(classes)), r):
            m = 0
            for i in combo:
                m |= masks[i]
            if m == full:
                cand = [x for i in combo for x in classes[i]]
                if best is None or len(cand) < len(best):
                    best = cand
    return None if best is None else ElementSet(ctx, best)


# -- Ruzsa covering -----------------------------------------------------------


def ruzsa_cover(S: ElementSet, T: ElementSet) -> CoverCertificate:
    """Greedy maximal family of disjoint left translates ``x T`` with centers ``x`` in ``S``.

    Maximality gives ``S ⊆ X T T^-1``; disjointness inside ``S T`` gives
    ``|X| |T| <= |S T|``.  Centers are tried in canonical order.
    """
    S._same(T)
    if not len(S) or not len(T):
        raise PreconditionError("ruzsa_cover needs nonempty sets")
    mul = S.ctx.mul
    t_elems = tuple(T.elements)
    used: set = set()
    centers = []
    for s in S.sorted():
        tr = [mul(s, t) for t in t_elems]
        if used.isdisjoint(tr):
            centers.append(s)
            used.update(tr)
    X = ElementSet(S.ctx, centers)
    covered = S.issubset(product(product(X, T), T.inverse()))
    st = len(product(S, T))
    return CoverCertificate(S, T, X, st, covered, True)


def cover_failure(cert: CoverCertificate) -> dict | None:
    S, T, X = cert.S, cert.T, cert.X
    missing = X.missing_from(S)
    if missing is not None:
        return {"condition": "X ⊆ S", "missing": _elem(S, missing)}
    mul = S.ctx.mul
    seen: set = set()
    for x in X.sorted():
        tr = {mul(x, t) for t in T.elements}
        if not seen.isdisjoint(tr):
            return {"condition": "translates x T pairwise disjoint", "center": _elem(S, x)}
        seen |= tr
    missing = S.missing_from(product(product(X, T), T.inverse()))
    if missing is not None:
        return {"condition": "S ⊆ X T T^-1", "missing": _elem(S, missing)}
    st = len(product(S, T))
    if st != cert.product_size:
        return {"condition": "|S T| recorded correctly", "lhs": cert.product_size, "rhs": st}
    if len(X) * len(T) > st:
        return {"condition": "|X| |T| <= |S T|", "lhs": len(X) * len(T), "rhs": st}
    return None


def verify_cover(cert: CoverCertificate) -> bool:
    return cover_failure(cert) is None


# -- subgroup control ---------------------------------------------------------


def subgroup_control(
    A: ElementSet,
    K,
    H: SubgroupOracle,
    x,
    k: int,
    witness: ElementSet | None = None,
) -> SubgroupControl:
    """Certify that ``B = A^2 ∩ H`` is a 2K^3-approximate group that 2K^(2k+4)/δ-controls ``A``.

    ``δ = |A^k ∩ H x| / |A|`` must be positive.  Constructions:

    * ``A^4 ⊆ A X^3`` for the witness ``X`` of ``A``; one representative of
      ``B^2 ∩ A y`` per ``y`` in ``X^3`` gives ``R`` with ``B^2 ⊆ B R``, and
      ``R ∪ R^-1`` witnesses ``B``.
    * the Ruzsa cover ``A ⊆ Y B^2``; then ``Z = Y R^-1`` has ``A ⊆ Z B`` and,
      by symmetry, ``A ⊆ B Z^-1``; ``Z ∪ Z^-1`` is the control set.
    """
    A.require_symmetric("A")
    K = _q(K)
    ctx = A.ctx
    if k < 1:
        raise PreconditionError(f"k must be >= 1, got {k}", k=k)
    if witness is None:
        w = find_witness(A, math.floor(K))
        if w is None:
            raise PreconditionError(f"no witness with |X| <= {K} found for A")
        witness = w.X
    failure = approx_failure(A, witness, K)
    if failure is not None:
        raise PreconditionError("A is not certified K-approximate", **failure)

    coset_part = intersect_coset(power(A, k), H, x)
    if not len(coset_part):
        raise PreconditionError("A^k ∩ H x is empty (δ = 0)", k=k)
    delta = Fraction(len(coset_part), len(A))

    A2 = product(A, A)
    B = A2.filter(H.contains)
    BB = product(B, B)
    mul = ctx.mul
    bb = BB.elements
    remaining = set(bb)
    reps = []
    for y in power(witness, 3).sorted():
        # b y^-1 in A  iff  b in A y
        hits = [b for a in A.elements if (b := mul(a, y)) in bb]
        if hits:
            reps.append(min(hits, key=ctx.sort_key))
            remaining.difference_update(hits)
    if remaining:
        raise CertificateError("B^2 ⊄ A X^3; the witness of A is inconsistent")
    R = ElementSet(ctx, reps)
    XB = R | R.inverse()
    bound_B = 2 * K**3
    failure = approx_failure(B, XB, bound_B)
    if failure is not None:
        raise CertificateError("constructed witness for A^2 ∩ H failed", **failure)
    approx = ApproxWitness(XB, bound_B, True, len(XB))
    # the construction only promises 2K^3; a greedy pass often finds a smaller witness
    greedy = find_witness(B, len(XB) - 1) if len(XB) > 1 else None
    if greedy is not None:
        approx = ApproxWitness(greedy.X, bound_B, True, greedy.greedy_size, greedy.exact_min, greedy.approx_bound)

    cover = ruzsa_cover(A, B)
    if not cover.covered:
        raise CertificateError("Ruzsa cover of A by B failed")
    Z = product(cover.X, R.inverse())
    XC = Z | Z.inverse()
    bound_C = 2 * K ** (2 * k + 4) / delta
    control = ControlWitness(B, XC, bound_C)
    failure = control_failure(A, control)
    if failure is not None:
        raise CertificateError("constructed control witness failed", **failure)
    return SubgroupControl(B, approx, control, delta, k, cover, R)
