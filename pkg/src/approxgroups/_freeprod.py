"""Output-sensitive product sets in free groups.

Every product ``s t`` of reduced words has a unique maximal cancellation
``s = P x^e U``, ``t = U^-1 y^f Q`` (syllable form).  The result is
``P x^e y^f Q`` when ``x != y`` and ``P x^(e+f) Q`` when ``x == y``; the case
``e + f == 0`` belongs to a deeper cancellation and is produced there.

Grouping both sets by the cancelled block ``U`` and by the outer context
``(x, P)`` / ``(y, Q)`` turns each merged block into a one-dimensional sumset
of exponents, computed with big-integer bitsets.  Sets such as
``{a^i b^j}`` times ``{b^k a^l}`` then cost roughly the size of the result
rather than ``|S| |T|``.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Callable, Iterable

_SMALL = 64


def _index_suffixes(S: Iterable[tuple]):
    heads: dict[tuple, dict[tuple, list[int]]] = defaultdict(lambda: defaultdict(list))
    exact: set[tuple] = set()
    for s in S:
        key: tuple = ()
        i = len(s)
        while True:
            if i == 0:
                exact.add(key)
                break
            heads[key][(s[i - 2], s[: i - 2])].append(s[i - 1])
            key = key + (s[i - 2], -s[i - 1])
            i -= 2
    return heads, exact


def _index_prefixes(T: Iterable[tuple]):
    heads: dict[tuple, dict[tuple, list[int]]] = defaultdict(lambda: defaultdict(list))
    exact: set[tuple] = set()
    for t in T:
        n = len(t)
        for j in range(0, n + 1, 2):
            key = t[:j]
            if j == n:
                exact.add(key)
            else:
                heads[key][(t[j], t[j + 2 :])].append(t[j + 1])
    return heads, exact


class _Sumsets:
    def __init__(self):
        self._cache: dict[tuple, list[int]] = {}

    def __call__(self, E: tuple, F: tuple) -> list[int]:
        if len(E) * len(F) <= _SMALL:
            return list({e + f for e in E for f in F})
        key = (E, F) if len(E) <= len(F) else (F, E)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        small, big = key
        off_b = big[0]
        mask_b = 0
        for v in big:
            mask_b |= 1 << (v - off_b)
        off_s = small[0]
        acc = 0
        for v in small:
            acc |= mask_b << (v - off_s)
        off = off_s + off_b
        bits = bin(acc)[:1:-1]
        out = [i + off for i, ch in enumerate(bits) if ch == "1"]
        self._cache[key] = out
        return out


def free_product(S: Iterable[tuple], T: Iterable[tuple], check: Callable[[int], None]) -> set[tuple]:
    """Exact ``{s t}`` for sets of syllable-form words; ``check(size)`` enforces the budget."""
    s_heads, s_exact = _index_suffixes(S)
    t_heads, t_exact = _index_prefixes(T)
    sumset = _Sumsets()
    out: set[tuple] = set()
    keys = (set(s_heads) | s_exact) & (set(t_heads) | t_exact)
    for key in keys:
        sh = {h: tuple(sorted(v)) for h, v in s_heads.get(key, {}).items()}
        th = {h: tuple(sorted(v)) for h, v in t_heads.get(key, {}).items()}
        se, te = key in s_exact, key in t_exact
        if se and te:
            out.add(())
        if se:
            for (y, Q), F in th.items():
                out.update((y, f) + Q for f in F)
        if te:
            for (x, P), E in sh.items():
                out.update(P + (x, e) for e in E)
        for (x, P), E in sh.items():
            for (y, Q), F in th.items():
                if x != y:
                    for e in E:
                        head = P + (x, e, y)
                        out.update(head + (f,) + Q for f in F)
                else:
                    head = P + (x,)
                    out.update(head + (m,) + Q for m in sumset(E, F) if m)
            check(len(out))
    return out
