"""JSON formats for sets and certificates, and re-verification from JSON alone.

Rationals are always written as ``"p/q"`` strings.  Sets are written in
canonical element order and documents with sorted keys, so equal inputs give
byte-identical files.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from . import covering, expansion, freecert
from .errors import ApproxGroupError, ElementError, PreconditionError
from .groups import Group, group_from_spec
from .sets import ElementSet


def fmt_q(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_q(v) -> Fraction:
    if isinstance(v, bool):
        raise ValueError(f"not a rational: {v!r}")
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v.strip())
    raise ValueError(f"not a rational: {v!r}")


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def set_json(S: ElementSet) -> list:
    to = S.ctx.element_to_json
    return [to(x) for x in S.sorted()]


def set_file(S: ElementSet) -> dict:
    return {"group": S.ctx.spec(), "elements": set_json(S)}


def elements_from_json(ctx: Group, items) -> ElementSet:
    if not isinstance(items, list):
        raise ElementError("element list must be a JSON array")
    return ElementSet(ctx, (ctx.element_from_json(v) for v in items))


def load_set(obj: dict, ctx: Group | None = None) -> ElementSet:
    if not isinstance(obj, dict) or "elements" not in obj:
        raise ElementError("set file needs 'group' and 'elements'")
    if ctx is None:
        ctx = group_from_spec(obj["group"])
    return elements_from_json(ctx, obj["elements"])


# -- certificates -------------------------------------------------------------


def approx_cert(A: ElementSet, w: covering.ApproxWitness) -> dict:
    out = {
        "kind": "approx-witness",
        "group": A.ctx.spec(),
        "A": set_json(A),
        "X": set_json(w.X),
        "K": fmt_q(w.K),
    }
    if w.greedy_size is not None:
        out["greedy_size"] = w.greedy_size
    if w.exact_min is not None:
        out["exact_min"] = w.exact_min
    if w.approx_bound is not None:
        out["approx_bound"] = fmt_q(w.approx_bound)
    return out


def control_cert(A: ElementSet, w: covering.ControlWitness) -> dict:
    return {
        "kind": "control-witness",
        "group": A.ctx.spec(),
        "A": set_json(A),
        "B": set_json(w.B),
        "X": set_json(w.X),
        "K": fmt_q(w.K),
    }


def cover_cert(c: covering.CoverCertificate) -> dict:
    return {
        "kind": "cover",
        "group": c.S.ctx.spec(),
        "S": set_json(c.S),
        "T": set_json(c.T),
        "X": set_json(c.X),
        "product_size": c.product_size,
        "ratio_bound": fmt_q(c.ratio_bound),
    }


def nesting_cert(A: ElementSet, B: ElementSet, res: expansion.NestingResult, K) -> dict:
    return {
        "kind": "nesting",
        "group": A.ctx.spec(),
        "A": set_json(A),
        "B": set_json(B),
        "m": res.m,
        "epsilon": fmt_q(res.epsilon),
        "K": fmt_q(K),
        "k": res.k,
        "j": res.j,
        "A_prime_size": len(res.A_prime),
        "A_prime_Bm_size": res.A_prime_Bm_size,
        "level_sizes": list(res.level_sizes),
    }


def freeness_cert(ctx: Group, cert: freecert.FreenessCertificate) -> dict:
    return {
        "kind": "freeness",
        "group": ctx.spec(),
        "mode": cert.mode,
        "pair": [ctx.element_to_json(x) for x in cert.pair],
        "details": cert.details,
    }


def relation_cert(ctx: Group, rel: freecert.Relation) -> dict:
    return {
        "kind": "relation",
        "group": ctx.spec(),
        "pair": [ctx.element_to_json(x) for x in rel.pair],
        "word": list(rel.word),
        "length": rel.length,
    }


def _sets(obj: dict, ctx: Group, *names: str) -> list[ElementSet]:
    try:
        return [elements_from_json(ctx, obj[n]) for n in names]
    except KeyError as exc:
        raise ApproxGroupError(f"certificate is missing field {exc.args[0]!r}") from exc


def certificate_failure(obj: dict) -> dict | None:
    """Re-check a serialized certificate from scratch; ``None`` when it holds."""
    if not isinstance(obj, dict) or "kind" not in obj or "group" not in obj:
        raise ApproxGroupError("not a certificate document")
    ctx = group_from_spec(obj["group"])
    kind = obj["kind"]
    if kind == "approx-witness":
        A, X = _sets(obj, ctx, "A", "X")
        if not (A.contains_identity and A.is_symmetric):
            return {"condition": "A symmetric and contains the identity"}
        return covering.approx_failure(A, X, parse_q(obj["K"]))
    if kind == "control-witness":
        A, B, X = _sets(obj, ctx, "A", "B", "X")
        return covering.control_failure(A, covering.ControlWitness(B, X, parse_q(obj["K"])))
    if kind == "cover":
        S, T, X = _sets(obj, ctx, "S", "T", "X")
        cert = covering.CoverCertificate(S, T, X, int(obj["product_size"]), True, True)
        return covering.cover_failure(cert)
    if kind == "nesting":
        A, B = _sets(obj, ctx, "A", "B")
        try:
            res = expansion.pigeonhole_nesting(
                A, B, int(obj["m"]), parse_q(obj["epsilon"]), parse_q(obj["K"])
            )
        except PreconditionError as exc:
            return {"condition": "nesting preconditions", **exc.detail}
        recorded = (obj["k"], obj["j"], obj["A_prime_size"], obj["A_prime_Bm_size"])
        actual = (res.k, res.j, len(res.A_prime), res.A_prime_Bm_size)
        if tuple(recorded) != actual:
            return {"condition": "recorded (k, j, |A'|, |A'B^m|) reproduce", "recorded": list(recorded),
                    "actual": list(actual)}
        return None
    if kind == "freeness":
        pair = tuple(ctx.element_from_json(v) for v in obj["pair"])
        cert = freecert.FreenessCertificate(obj["mode"], pair, obj.get("details", {}))
        return freecert.freeness_failure(ctx, cert)
    if kind == "relation":
        pair = tuple(ctx.element_from_json(v) for v in obj["pair"])
        return freecert.relation_failure(ctx, freecert.Relation(pair, tuple(obj["word"])))
    raise ApproxGroupError(f"unknown certificate kind {kind!r}")
