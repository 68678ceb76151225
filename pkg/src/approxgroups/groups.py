"""Built-in exact-arithmetic group families.

Elements are plain immutable Python values in canonical form, so they hash
and compare by value and can be shared freely:

* ``FreeGroup``: reduced words in *syllable form*, a flat tuple
  ``(g1, e1, g2, e2, ...)`` with generator indices ``1..rank``, nonzero
  exponents and ``g_i != g_{i+1}``.  ``a b^-1 a^3`` is ``(1, 1, 2, -1, 1, 3)``.
* ``FreeAbelian``: integer tuples of length ``rank``.
* ``Heisenberg``: integer triples ``(x, y, z)`` multiplied as
  ``(x, y, z)(x', y', z') = (x + x', y + y', z + z' + x y')``.
* ``MatrixGroup``: row-major tuples of ``n*n`` exact rationals; an entry is
  an ``int`` when integral and a reduced ``Fraction`` otherwise.
* ``FiniteTable``: indices ``0..N-1`` into a validated multiplication table.

The group objects carry the arithmetic.  ``mul``/``inv`` at module level
validate their arguments; the methods on the group objects do not, and are
what the set algorithms call in their inner loops.
"""

from __future__ import annotations

import operator
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, ClassVar, Hashable, Iterable, Sequence

import numpy as np

from .errors import ElementError, GroupSpecError

Element = Hashable

_SUPERSCRIPT = str.maketrans("⁰¹²³⁴⁵⁶⁷⁸⁹⁻", "0123456789-")


class Group(ABC):
    family: ClassVar[str]
    # True when the payloads themselves compare in canonical order
    natural_order: ClassVar[bool] = True

    @abstractmethod
    def identity(self) -> Element: ...

    @abstractmethod
    def mul(self, x: Element, y: Element) -> Element: ...

    @abstractmethod
    def inv(self, x: Element) -> Element: ...

    @abstractmethod
    def canonical(self, x: Any) -> Element:
        """Bring ``x`` to canonical form, raising ``ElementError`` if it is not an element."""

    @abstractmethod
    def spec(self) -> dict: ...

    @abstractmethod
    def standard_generators(self) -> list[Element]:
        """A symmetric generating set containing the identity."""

    def is_element(self, x: Any) -> bool:
        try:
            return self.canonical(x) == x
        except (ElementError, TypeError, ValueError):
            return False

    def check(self, x: Any) -> Element:
        if not self.is_element(x):
            raise ElementError(f"{x!r} is not a canonical element of {self.spec()}", element=repr(x))
        return x

    def sort_key(self, x: Element) -> Any:
        return x

    def norm(self, x: Element) -> Any:
        """Size measure used for deterministic pruning heuristics."""
        return 0

    def element_to_json(self, x: Element) -> Any:
        return x

    def element_from_json(self, obj: Any) -> Element:
        return self.canonical(obj)

    def power(self, x: Element, n: int) -> Element:
        if n < 0:
            x, n = self.inv(x), -n
        result = self.identity()
        while n:
            if n & 1:
                result = self.mul(result, x)
            x = self.mul(x, x)
            n >>= 1
        return result

    def format(self, x: Element) -> str:
        return str(self.element_to_json(x))


# -- free groups -------------------------------------------------------------


def _push_syllables(pairs: Iterable[tuple[int, int]]) -> tuple[int, ...]:
    out: list[int] = []
    for g, e in pairs:
        if e == 0:
            continue
        if out and out[-2] == g:
            e += out[-1]
            del out[-2:]
            if e == 0:
                continue
        out += (g, e)
    return tuple(out)


def free_mul(x: tuple, y: tuple) -> tuple:
    i, j, ny = len(x), 0, len(y)
    while i and j < ny and x[i - 2] == y[j] and x[i - 1] == -y[j + 1]:
        i -= 2
        j += 2
    if i and j < ny and x[i - 2] == y[j]:
        return x[: i - 1] + (x[i - 1] + y[j + 1],) + y[j + 2 :]
    if j == 0:
        return x + y
    return x[:i] + y[j:]


def free_inv(x: tuple) -> tuple:
    out = []
    for i in range(len(x) - 2, -1, -2):
        out += (x[i], -x[i + 1])
    return tuple(out)


@dataclass(frozen=True)
class FreeGroup(Group):
    rank: int
    family: ClassVar[str] = "free"

    def __post_init__(self):
        if self.rank < 1:
            raise GroupSpecError("free group rank must be >= 1", rank=self.rank)

    def identity(self):
        return ()

    def mul(self, x, y):
        return free_mul(x, y)

    def inv(self, x):
        return free_inv(x)

    def canonical(self, x):
        if not isinstance(x, tuple) or len(x) % 2:
            raise ElementError(f"free-group payload must be an even-length tuple, got {x!r}")
        for k in range(0, len(x), 2):
            g, e = x[k], x[k + 1]
            if not (isinstance(g, int) and isinstance(e, int)) or not 1 <= g <= self.rank:
                raise ElementError(f"bad syllable {(g, e)!r} for rank {self.rank}")
        return _push_syllables(zip(x[::2], x[1::2]))

    def from_letters(self, letters: Sequence[int]) -> tuple:
        """Freely reduce a sequence of signed generator indices (``[1, -2]`` is ``a b^-1``)."""
        for letter in letters:
            if not isinstance(letter, int) or letter == 0 or abs(letter) > self.rank:
                raise ElementError(f"bad letter {letter!r} for rank {self.rank}")
        return _push_syllables((abs(l), 1 if l > 0 else -1) for l in letters)

    def letters(self, x: tuple) -> list[int]:
        out: list[int] = []
        for k in range(0, len(x), 2):
            g, e = x[k], x[k + 1]
            out += [g if e > 0 else -g] * abs(e)
        return out

    def generator(self, i: int) -> tuple:
        return (i, 1)

    def word(self, text: str) -> tuple:
        """Parse ``"a b^-1 a^3"`` (also ``a b⁻¹``); letters a, b, c, ... name the generators."""
        pairs = []
        for tok in text.translate(_SUPERSCRIPT).split():
            m = re.fullmatch(r"([a-z])(?:\^?(-?\d+))?", tok)
            if not m:
                raise ElementError(f"cannot parse word token {tok!r}")
            g = ord(m.group(1)) - ord("a") + 1
            if g > self.rank:
                raise ElementError(f"generator {m.group(1)!r} exceeds rank {self.rank}")
            pairs.append((g, int(m.group(2)) if m.group(2) else 1))
        return _push_syllables(pairs)

    def length(self, x: tuple) -> int:
        return sum(abs(e) for e in x[1::2])

    def norm(self, x):
        return self.length(x)

    def spec(self):
        return {"family": "free", "rank": self.rank}

    def standard_generators(self):
        gens = [()]
        for g in range(1, self.rank + 1):
            gens += [(g, 1), (g, -1)]
        return gens

    def element_to_json(self, x):
        return self.letters(x)

    def element_from_json(self, obj):
        if not isinstance(obj, list):
            raise ElementError(f"free-group element must be a list of letters, got {obj!r}")
        return self.from_letters(obj)

    def format(self, x):
        if not x:
            return "e"
        parts = []
        for k in range(0, len(x), 2):
            g, e = chr(ord("a") + x[k] - 1), x[k + 1]
            parts.append(g if e == 1 else f"{g}^{e}")
        return " ".join(parts)


# -- free abelian groups and the Heisenberg group ---------------------------


def _int_tuple(x, n: int) -> tuple:
    if isinstance(x, (list, tuple)) and len(x) == n and all(
        isinstance(c, int) and not isinstance(c, bool) for c in x
    ):
        return tuple(x)
    raise ElementError(f"expected {n} integers, got {x!r}")


@dataclass(frozen=True)
class FreeAbelian(Group):
    rank: int
    family: ClassVar[str] = "abelian"

    def __post_init__(self):
        if self.rank < 1:
            raise GroupSpecError("free abelian rank must be >= 1", rank=self.rank)

    def identity(self):
        return (0,) * self.rank

    def mul(self, x, y):
        if self.rank == 1:
            return (x[0] + y[0],)
        return tuple(map(operator.add, x, y))

    def inv(self, x):
        return tuple(-c for c in x)

    def canonical(self, x):
        return _int_tuple(x, self.rank)

    def norm(self, x):
        return max(abs(c) for c in x)

    def spec(self):
        return {"family": "abelian", "rank": self.rank}

    def standard_generators(self):
        gens = [self.identity()]
        for i in range(self.rank):
            for s in (1, -1):
                v = [0] * self.rank
                v[i] = s
                gens.append(tuple(v))
        return gens

    def element_to_json(self, x):
        return list(x)


@dataclass(frozen=True)
class Heisenberg(Group):
    """Integer Heisenberg group, written as triples ``(x, y, z)``.

    ``(x, y, z)`` corresponds to the unitriangular matrix
    ``[[1, x, z], [0, 1, y], [0, 0, 1]]``.
    """

    family: ClassVar[str] = "heisenberg"

    def identity(self):
        return (0, 0, 0)

    def mul(self, p, q):
        return (p[0] + q[0], p[1] + q[1], p[2] + q[2] + p[0] * q[1])

    def inv(self, p):
        return (-p[0], -p[1], p[0] * p[1] - p[2])

    def canonical(self, x):
        return _int_tuple(x, 3)

    def norm(self, x):
        return max(abs(c) for c in x)

    def spec(self):
        return {"family": "heisenberg"}

    def standard_generators(self):
        return [(0, 0, 0), (1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)]

    def element_to_json(self, x):
        return list(x)


# -- matrix groups -----------------------------------------------------------


def _entry(v) -> int | Fraction:
    if isinstance(v, bool):
        raise ElementError(f"bad matrix entry {v!r}")
    if isinstance(v, int):
        return v
    if isinstance(v, (Fraction, str)):
        try:
            f = Fraction(v)
        except (ValueError, ZeroDivisionError) as exc:
            raise ElementError(f"bad matrix entry {v!r}") from exc
        return f.numerator if f.denominator == 1 else f
    raise ElementError(f"bad matrix entry {v!r}")


def _det(rows: list[list[Fraction]]) -> Fraction:
    n = len(rows)
    m = [r[:] for r in rows]
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                for k in range(c, n):
                    m[r][k] -= f * m[c][k]
    return det


@dataclass(frozen=True)
class MatrixGroup(Group):
    """Invertible ``n x n`` matrices with exact rational entries."""

    n: int
    family: ClassVar[str] = "matrix"
    natural_order: ClassVar[bool] = False

    def __post_init__(self):
        if self.n < 1:
            raise GroupSpecError("matrix dimension must be >= 1", n=self.n)

    def identity(self):
        n = self.n
        return tuple(1 if i == j else 0 for i in range(n) for j in range(n))

    def mul(self, x, y):
        n = self.n
        if n == 2:
            a, b, c, d = x
            p, q, r, s = y
            return _canon_entries((a * p + b * r, a * q + b * s, c * p + d * r, c * q + d * s))
        return _canon_entries(
            tuple(
                sum(x[i * n + k] * y[k * n + j] for k in range(n))
                for i in range(n)
                for j in range(n)
            )
        )

    def inv(self, x):
        n = self.n
        if n == 2:
            a, b, c, d = x
            det = a * d - b * c
            if det in (1, -1):
                return _canon_entries((d * det, -b * det, -c * det, a * det))
            det = Fraction(det)
            return _canon_entries((d / det, -b / det, -c / det, a / det))
        m = [[Fraction(x[i * n + j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
             for i in range(n)]
        for c in range(n):
            p = next(r for r in range(c, n) if m[r][c] != 0)
            m[c], m[p] = m[p], m[c]
            piv = m[c][c]
            m[c] = [v / piv for v in m[c]]
            for r in range(n):
                if r != c and m[r][c]:
                    f = m[r][c]
                    m[r] = [v - f * w for v, w in zip(m[r], m[c])]
        return _canon_entries(tuple(m[i][n + j] for i in range(n) for j in range(n)))

    def determinant(self, x) -> Fraction:
        n = self.n
        return _det([[Fraction(x[i * n + j]) for j in range(n)] for i in range(n)])

    def canonical(self, x):
        n = self.n
        if isinstance(x, (list, tuple)) and len(x) == n and all(isinstance(r, (list, tuple)) for r in x):
            x = [v for row in x for v in row]
        if not isinstance(x, (list, tuple)) or len(x) != n * n:
            raise ElementError(f"expected {n * n} matrix entries, got {x!r}")
        entries = tuple(_entry(v) for v in x)
        if self.determinant(entries) == 0:
            raise ElementError(f"singular matrix {x!r}")
        return entries

    def matrix(self, rows: Sequence[Sequence]) -> tuple:
        return self.canonical([v for row in rows for v in row])

    def rows(self, x) -> list[list]:
        n = self.n
        return [list(x[i * n : (i + 1) * n]) for i in range(n)]

    def sort_key(self, x):
        return tuple((v.numerator, v.denominator) for v in x)

    def norm(self, x):
        return max(abs(v) for v in x)

    def spec(self):
        return {"family": "matrix", "n": self.n}

    def standard_generators(self):
        """Identity and the elementary matrices ``I +- E_ij`` (generators of SL_n(Z))."""
        n = self.n
        gens = [self.identity()]
        for i in range(n):
            for j in range(n):
                if i != j:
                    for s in (1, -1):
                        m = list(self.identity())
                        m[i * n + j] = s
                        gens.append(tuple(m))
        return gens

    def element_to_json(self, x):
        return [f"{Fraction(v).numerator}/{Fraction(v).denominator}" for v in x]

    def format(self, x):
        return str([[str(v) for v in row] for row in self.rows(x)])


def _canon_entries(t: tuple) -> tuple:
    if all(type(v) is int for v in t):
        return t
    return tuple(v.numerator if isinstance(v, Fraction) and v.denominator == 1 else v for v in t)


# -- finite groups given by a multiplication table --------------------------


@dataclass(frozen=True)
class FiniteTable(Group):
    """A finite group given by its full multiplication table.

    The table is validated as a group at construction: closure, a two-sided
    identity, inverses, and associativity (full triple check up to order 256).
    """

    table: tuple[tuple[int, ...], ...]
    family: ClassVar[str] = "table"
    _identity: int = field(init=False, repr=False, compare=False)
    _inverse: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        table = tuple(tuple(row) for row in self.table)
        object.__setattr__(self, "table", table)
        n = len(table)
        if n == 0 or any(len(row) != n for row in table):
            raise GroupSpecError("multiplication table must be a nonempty square array")
        t = np.array(table, dtype=np.int64)
        if t.min() < 0 or t.max() >= n:
            raise GroupSpecError("multiplication table is not closed")
        ids = [e for e in range(n) if (t[e] == np.arange(n)).all() and (t[:, e] == np.arange(n)).all()]
        if not ids:
            raise GroupSpecError("multiplication table has no two-sided identity")
        e = ids[0]
        inverse = []
        for a in range(n):
            right = np.flatnonzero(t[a] == e)
            if len(right) != 1 or t[right[0], a] != e:
                raise GroupSpecError(f"element {a} has no two-sided inverse", element=a)
            inverse.append(int(right[0]))
        if n <= 256:
            left = t[t]  # (ab)c
            right_ = t[np.arange(n)[:, None, None], t[None, :, :]]  # a(bc)
            if not (left == right_).all():
                a, b, c = map(int, np.argwhere(left != right_)[0])
                raise GroupSpecError("multiplication table is not associative", triple=[a, b, c])
        object.__setattr__(self, "_identity", e)
        object.__setattr__(self, "_inverse", tuple(inverse))

    @property
    def order(self) -> int:
        return len(self.table)

    def identity(self):
        return self._identity

    def mul(self, x, y):
        return self.table[x][y]

    def inv(self, x):
        return self._inverse[x]

    def canonical(self, x):
        if isinstance(x, int) and not isinstance(x, bool) and 0 <= x < len(self.table):
            return x
        raise ElementError(f"{x!r} is not an element index of a group of order {len(self.table)}")

    def spec(self):
        return {"family": "table", "table": [list(row) for row in self.table]}

    def standard_generators(self):
        return list(range(len(self.table)))


# -- group specs -------------------------------------------------------------


def group_from_spec(spec: dict | str) -> Group:
    """Build a group from its JSON spec or a short CLI string.

    Short strings: ``free:2``, ``abelian:1`` (alias ``z``), ``heisenberg``,
    ``matrix:2``, and the named finite tables understood by
    :func:`approxgroups.tables.named_table` (``cyclic:6``, ``dihedral:4``, ...).
    """
    if isinstance(spec, str):
        name, _, arg = spec.partition(":")
        try:
            if name == "free":
                return FreeGroup(int(arg))
            if name == "abelian":
                return FreeAbelian(int(arg))
            if name == "z":
                return FreeAbelian(1)
            if name == "heisenberg":
                return Heisenberg()
            if name == "matrix":
                return MatrixGroup(int(arg))
        except ValueError as exc:
            raise GroupSpecError(f"bad group spec {spec!r}") from exc
        from .tables import named_table

        return named_table(spec)
    if not isinstance(spec, dict) or "family" not in spec:
        raise GroupSpecError(f"bad group spec {spec!r}")
    family = spec["family"]
    if family == "free":
        return FreeGroup(int(spec["rank"]))
    if family == "abelian":
        return FreeAbelian(int(spec["rank"]))
    if family == "heisenberg":
        return Heisenberg()
    if family == "matrix":
        return MatrixGroup(int(spec["n"]))
    if family == "table":
        return FiniteTable(spec["table"])
    raise GroupSpecError(f"unknown group family {family!r}")


def mul(ctx: Group, x: Element, y: Element) -> Element:
    return ctx.mul(ctx.check(x), ctx.check(y))


def inv(ctx: Group, x: Element) -> Element:
    return ctx.inv(ctx.check(x))
