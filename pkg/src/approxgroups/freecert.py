"""Searching for and certifying pairs that generate free subgroups.

Two certification modes:

* ``ping-pong``: the pair is ``[[1, t], [0, 1]]``, ``[[1, 0], [s, 1]]`` with
  ``|t|, |s| >= 2``, for which the classical ping-pong argument on the cones
  ``|x| > |y|`` and ``|x| < |y|`` proves freeness.
* ``no-relation``: no nonempty reduced word of length ``<= L`` in the pair
  evaluates to the identity.  This is a falsifiable statement, not a proof
  of freeness.

Words over the pair are tuples of letters ``1, -1, 2, -2`` standing for
``a, a^-1, b, b^-1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import BudgetExceeded, PreconditionError
from .groups import Element, Group, MatrixGroup
from .sets import ElementSet, get_budget, power

PING_PONG = "ping-pong"
NO_RELATION = "no-relation"
_LETTERS = (1, -1, 2, -2)


@dataclass(frozen=True)
class FreenessCertificate:
    mode: str
    pair: tuple[Element, Element]
    details: dict = field(hash=False)


@dataclass(frozen=True)
class Relation:
    """A nonempty reduced word in the pair that evaluates to the identity."""

    pair: tuple[Element, Element]
    word: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.word)


def letter_key(word: tuple[int, ...]) -> tuple:
    """Canonical word order: ``a < a^-1 < b < b^-1``, compared lexicographically."""
    return tuple((abs(l), l < 0) for l in word)


def format_word(word: tuple[int, ...]) -> str:
    names = {1: "a", -1: "a⁻¹", 2: "b", -2: "b⁻¹"}
    return " ".join(names[l] for l in word) or "e"


def reduce_word(letters) -> tuple[int, ...]:
    out: list[int] = []
    for l in letters:
        if out and out[-1] == -l:
            out.pop()
        else:
            out.append(l)
    return tuple(out)


def inverse_word(word: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(-l for l in reversed(word))


def evaluate(ctx: Group, a: Element, b: Element, word) -> Element:
    vals = {1: a, -1: ctx.inv(a), 2: b, -2: ctx.inv(b)}
    x = ctx.identity()
    for l in word:
        x = ctx.mul(x, vals[l])
    return x


def count_reduced_words(L: int) -> int:
    """Nonempty reduced words of length ``<= L`` on two generators."""
    return sum(4 * 3 ** (n - 1) for n in range(1, L + 1))


# -- ping-pong ----------------------------------------------------------------


def _unipotent(x) -> tuple[str, int] | None:
    if len(x) != 4 or x[0] != 1 or x[3] != 1 or not all(isinstance(v, int) for v in x):
        return None
    if x[2] == 0 and abs(x[1]) >= 2:
        return ("upper", x[1])
    if x[1] == 0 and abs(x[2]) >= 2:
        return ("lower", x[2])
    return None


def pingpong_certify(ctx: Group, a: Element, b: Element) -> FreenessCertificate | None:
    """Ping-pong certificate for an upper/lower unipotent pair; ``None`` means "not matched", not "not free"."""
    if not isinstance(ctx, MatrixGroup) or ctx.n != 2:
        raise PreconditionError("ping-pong certification needs 2x2 matrices")
    ua, ub = _unipotent(ctx.check(a)), _unipotent(ctx.check(b))
    if ua is None or ub is None or ua[0] == ub[0]:
        return None
    upper, lower = (ua[1], ub[1]) if ua[0] == "upper" else (ub[1], ua[1])
    details = {
        "criterion": "unipotent 2x2: [[1,t],[0,1]], [[1,0],[s,1]] with |t|, |s| >= 2",
        "t": upper,
        "s": lower,
        "upper_first": ua[0] == "upper",
    }
    return FreenessCertificate(PING_PONG, (a, b), details)


# -- relation search ----------------------------------------------------------


def no_relation_check(ctx: Group, a: Element, b: Element, L: int) -> FreenessCertificate | Relation:
    """Shortest relation of length ``<= L`` in ``a, b`` (canonical tie-break), else a certificate.

    Meet in the middle: a reduced word ``w`` of length ``n`` evaluates to the
    identity iff its first ``ceil(n/2)`` letters and the inverse of the rest
    evaluate equally, so only words up to length ``ceil(L/2)`` are evaluated.
    After level ``h`` every relation of length ``<= 2h`` has been seen.
    """
    if L < 1:
        raise PreconditionError(f"relation length bound must be >= 1, got {L}", L=L)
    half = (L + 1) // 2
    if 4 * 3 ** (half - 1) > get_budget():
        raise BudgetExceeded("too many words for the relation search", L=L)
    vals = {1: a, -1: ctx.inv(a), 2: b, -2: ctx.inv(b)}
    e = ctx.identity()
    classes: dict = {e: [()]}
    level = [((), e)]
    evaluated = 1
    best: tuple | None = None

    def offer(w: tuple, v: tuple) -> None:
        nonlocal best
        for rel in (reduce_word(w + inverse_word(v)), reduce_word(v + inverse_word(w))):
            if rel and len(rel) <= L:
                cand = (len(rel), letter_key(rel), rel)
                if best is None or cand < best:
                    best = cand

    for h in range(1, half + 1):
        nxt = []
        for w, x in level:
            for l in _LETTERS:
                if w and w[-1] == -l:
                    continue
                w2, x2 = w + (l,), ctx.mul(x, vals[l])
                bucket = classes.setdefault(x2, [])
                for v in bucket:
                    offer(w2, v)
                bucket.append(w2)
                nxt.append((w2, x2))
        evaluated += len(nxt)
        level = nxt
        if best is not None and best[0] <= 2 * h:
            break
    if best is not None:
        return Relation((a, b), best[2])
    details = {"L": L, "words_excluded": count_reduced_words(L), "words_evaluated": evaluated}
    return FreenessCertificate(NO_RELATION, (a, b), details)


def shortest_relation_bruteforce(ctx: Group, a: Element, b: Element, L: int) -> Relation | None:
    """Reference search: evaluate every reduced word of length ``<= L`` in order."""
    for n in range(1, L + 1):
        hits = []
        for word in itertools.product(_LETTERS, repeat=n):
            if any(word[i] == -word[i + 1] for i in range(n - 1)):
                continue
            if evaluate(ctx, a, b, word) == ctx.identity():
                hits.append(word)
        if hits:
            return Relation((a, b), min(hits, key=letter_key))
    return None


# -- pair search --------------------------------------------------------------


@dataclass(frozen=True)
class FreePair:
    pair: tuple[Element, Element]
    certificate: FreenessCertificate

    @property
    def mode(self) -> str:
        return self.certificate.mode


def free_pair_search(A: ElementSet, m: int, L: int, *, Am: ElementSet | None = None) -> FreePair | None:
    """First pair of ``A^m`` (canonical order) with a ping-pong certificate, else the first with no relation up to ``L``.

    ``None`` is inconclusive: no pair of ``A^m`` passed either test.
    """
    if m < 1:
        raise PreconditionError(f"m must be >= 1, got {m}", m=m)
    ctx = A.ctx
    P = Am if Am is not None else power(A, m)
    elems = P.sorted()
    if isinstance(ctx, MatrixGroup) and ctx.n == 2:
        for x, y in itertools.combinations(elems, 2):
            cert = pingpong_certify(ctx, x, y)
            if cert is not None:
                return FreePair((x, y), cert)
    for x, y in itertools.combinations(elems, 2):
        res = no_relation_check(ctx, x, y, L)
        if isinstance(res, FreenessCertificate):
            return FreePair((x, y), res)
    return None


def freeness_failure(ctx: Group, cert: FreenessCertificate) -> dict | None:
    a, b = cert.pair
    if cert.mode == PING_PONG:
        again = pingpong_certify(ctx, a, b)
        if again is None:
            return {"condition": "pair matches the unipotent ping-pong pattern"}
        return None
    if cert.mode == NO_RELATION:
        L = int(cert.details["L"])
        res = no_relation_check(ctx, a, b, L)
        if isinstance(res, Relation):
            return {"condition": f"no relation of length <= {L}", "relation": list(res.word)}
        return None
    return {"condition": "known certificate mode", "mode": cert.mode}


def relation_failure(ctx: Group, rel: Relation) -> dict | None:
    a, b = rel.pair
    if not rel.word or reduce_word(rel.word) != tuple(rel.word):
        return {"condition": "relation is a nonempty reduced word"}
    if evaluate(ctx, a, b, rel.word) != ctx.identity():
        return {"condition": "relation evaluates to the identity"}
    return None

