"""Command-line front end.

Exit codes: 0 success, 1 a certificate or search did not check, 2 usage or
input error, 3 element budget exceeded.  Reports are JSON with sorted keys;
failures carry the failing condition under ``"error"``.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import covering, expansion, freecert, pipeline, serialize
from .errors import ApproxGroupError, BudgetExceeded, PipelineInconsistency
from .groups import group_from_spec
from .oracles import subgroup_oracle
from .sets import ElementSet, ball, default_workers, doubling, product, set_budget, set_workers

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class _Failed(Exception):
    """A verification that ran and came out negative."""

    def __init__(self, report: dict):
        super().__init__(report.get("error", {}).get("condition", "verification failed"))
        self.report = report


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ApproxGroupError(f"{path}: invalid JSON ({exc.msg})", file=path) from exc


def _load(path: str, ctx=None) -> ElementSet:
    return serialize.load_set(_read_json(path), ctx)


def _elem(ctx, text: str):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError:
        obj = text
    if isinstance(obj, str) and hasattr(ctx, "word"):
        return ctx.word(obj)
    return ctx.element_from_json(obj)


def _emit(args, report: dict) -> None:
    text = serialize.dumps(report)
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_error(report: dict) -> None:
    sys.stdout.write(serialize.dumps(report))


def _approx(args, report: dict, **values) -> dict:
    if args.approx:
        report["approx"] = {k: f"{float(Fraction(v)):.6g}" for k, v in values.items()}
    return report


# -- commands -----------------------------------------------------------------


def cmd_gen_ball(args) -> dict:
    ctx = group_from_spec(args.group)
    gens = _load(args.gens, ctx) if args.gens else None
    B = ball(ctx, gens, args.radius)
    return serialize.set_file(B)


def cmd_product(args) -> dict:
    S = _load(args.set)
    T = _load(args.right, S.ctx) if args.right else S
    return serialize.set_file(product(S, T, workers=args.jobs))


def cmd_doubling(args) -> dict:
    S = _load(args.set)
    r = doubling(S)
    report = {"size": len(S), "product_size": len(product(S, S, workers=args.jobs)), "ratio": serialize.fmt_q(r)}
    return _approx(args, report, ratio=r)


def cmd_witness(args) -> dict:
    A = _load(args.set)
    pool = _load(args.pool, A.ctx) if args.pool else None
    K = serialize.parse_q(args.K)
    w = covering.find_witness(A, K, pool)
    if w is None:
        raise _Failed({"error": {"condition": f"greedy witness with |X| <= {K}", "message": "no witness found"}})
    return serialize.approx_cert(A, w)


def cmd_cover(args) -> dict:
    S = _load(args.set)
    T = _load(args.right, S.ctx)
    cert = covering.ruzsa_cover(S, T)
    report = serialize.cover_cert(cert)
    return _approx(args, report, ratio_bound=cert.ratio_bound)


def cmd_control(args) -> dict:
    A = _load(args.set)
    ctx = A.ctx
    H = subgroup_oracle(ctx, args.subgroup)
    x = _elem(ctx, args.x) if args.x is not None else ctx.identity()
    witness = _load(args.witness, ctx) if args.witness else None
    sc = covering.subgroup_control(A, serialize.parse_q(args.K), H, x, args.k, witness)
    report = {
        "kind": "subgroup-control",
        "subgroup": H.name,
        "x": ctx.element_to_json(x),
        "k": sc.k,
        "delta": serialize.fmt_q(sc.delta),
        "certificates": [
            serialize.approx_cert(sc.B, sc.approx),
            serialize.control_cert(A, sc.control),
            serialize.cover_cert(sc.cover),
        ],
    }
    return _approx(args, report, delta=sc.delta, control_constant=sc.control.K)


def cmd_expand(args) -> dict:
    A = _load(args.set)
    ctx = A.ctx
    X = _load(args.X, ctx) if args.X else ElementSet(ctx, ctx.standard_generators())
    rep = expansion.expansion_ratio(A, X)
    report = {
        "A_size": rep.A_size,
        "AX_size": rep.AX_size,
        "ratio": serialize.fmt_q(rep.ratio),
        "at_least_5/4": rep.ratio >= expansion.VON_NEUMANN,
    }
    return _approx(args, report, ratio=rep.ratio)


def cmd_nesting(args) -> dict:
    A = _load(args.set)
    B = _load(args.B, A.ctx)
    K = serialize.parse_q(args.K)
    res = expansion.pigeonhole_nesting(A, B, args.m, serialize.parse_q(args.epsilon), K)
    return serialize.nesting_cert(A, B, res, K)


def cmd_kappa(args) -> dict:
    ctx = group_from_spec(args.group)
    X = _load(args.X, ctx) if args.X else ElementSet(ctx, ctx.standard_generators())
    sampler = expansion.parse_sampler(args.sampler)
    kappa = expansion.kappa_probe(ctx, X, sampler, args.trials, args.seed)
    report = {
        "kappa_upper": serialize.fmt_q(kappa),
        "sampler": sampler.describe(),
        "trials": args.trials,
        "seed": args.seed,
        "X_size": len(X),
    }
    return _approx(args, report, kappa_upper=kappa)


def cmd_freepair(args) -> dict:
    if args.pair:
        ctx = group_from_spec(args.group) if args.group else None
        if ctx is None:
            raise ApproxGroupError("--pair needs --group")
        a, b = (_elem(ctx, t) for t in args.pair)
        if args.mode == freecert.PING_PONG:
            cert = freecert.pingpong_certify(ctx, a, b)
            if cert is None:
                raise _Failed({"error": {"condition": "pair matches the unipotent ping-pong pattern"}})
            return serialize.freeness_cert(ctx, cert)
        res = freecert.no_relation_check(ctx, a, b, args.L)
        if isinstance(res, freecert.Relation):
            return serialize.relation_cert(ctx, res)
        return serialize.freeness_cert(ctx, res)
    if not args.set:
        raise ApproxGroupError("freepair needs --set or --pair")
    A = _load(args.set)
    found = freecert.free_pair_search(A, args.m, args.L)
    if found is None:
        return {"result": "none", "inconclusive": True, "m": args.m, "L": args.L}
    return serialize.freeness_cert(A.ctx, found.certificate)


def cmd_pipeline(args) -> dict:
    A = _load(args.set)
    ctx = A.ctx
    core = None if args.core in (None, "auto") else _load(args.core, ctx)
    tr = pipeline.run_pipeline(
        A,
        serialize.parse_q(args.K),
        args.m,
        serialize.parse_q(args.epsilon),
        subgroup_oracle(ctx, args.subgroup),
        core,
        args.L,
        args.core_budget,
    )
    return tr.to_json()


def cmd_verify(args) -> dict:
    obj = _read_json(args.certificate)
    failure = serialize.certificate_failure(obj)
    if failure is not None:
        raise _Failed({"kind": obj.get("kind"), "verified": False, "error": failure})
    return {"kind": obj["kind"], "verified": True}


def cmd_verify_transcript(args) -> dict:
    obj = _read_json(args.transcript)
    problems = pipeline.transcript_failures(obj, rerun=not args.no_rerun)
    if problems:
        raise _Failed({"verified": False, "error": problems[0], "problems": problems})
    return {"kind": "pipeline-transcript", "outcome": obj["outcome"], "verified": True,
            "steps": len(obj["steps"])}


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="sampler seed (default 0)")
    common.add_argument("--budget", type=int, default=10**7, help="element budget (default 10^7)")
    common.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--approx", action="store_true", help="add non-authoritative decimal approximations")

    p = argparse.ArgumentParser(prog="approxgroups", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        sp = sub.add_parser(name, parents=[common], help=help)
        sp.set_defaults(func=fn)
        return sp

    sp = add("gen-ball", cmd_gen_ball, "ball of a given radius")
    sp.add_argument("--group", required=True)
    sp.add_argument("--radius", type=int, required=True)
    sp.add_argument("--gens", help="set file of symmetric generators containing the identity")

    sp = add("product", cmd_product, "product set S T (S S without --right)")
    sp.add_argument("--set", required=True)
    sp.add_argument("--right")

    sp = add("doubling", cmd_doubling, "|S^2| / |S|")
    sp.add_argument("--set", required=True)

    sp = add("witness", cmd_witness, "greedy approximate-group witness")
    sp.add_argument("--set", required=True)
    sp.add_argument("--K", required=True)
    sp.add_argument("--pool")

    sp = add("cover", cmd_cover, "Ruzsa covering of S by translates of T T^-1")
    sp.add_argument("--set", required=True)
    sp.add_argument("--right", required=True)

    sp = add("control", cmd_control, "control of A by A^2 ∩ H")
    sp.add_argument("--set", required=True)
    sp.add_argument("--K", required=True)
    sp.add_argument("--subgroup", required=True)
    sp.add_argument("--x", help="coset representative as JSON (default identity)")
    sp.add_argument("--k", type=int, default=pipeline.CONTROL_K)
    sp.add_argument("--witness", help="set file with a witness X for A")

    sp = add("expand", cmd_expand, "expansion ratio |A X| / |A|")
    sp.add_argument("--set", required=True)
    sp.add_argument("--test-set", "--X", dest="X", help="set file for X (default: standard generators)")

    sp = add("nesting", cmd_nesting, "pigeonhole nesting level")
    sp.add_argument("--set", required=True)
    sp.add_argument("--core", "--B", dest="B", required=True, help="set file for the core set B")
    sp.add_argument("--m", type=int, default=expansion.DEFAULT_M)
    sp.add_argument("--epsilon", default="1/10")
    sp.add_argument("--K", required=True)

    sp = add("kappa", cmd_kappa, "sampled upper bound on the expansion constant")
    sp.add_argument("--group", required=True)
    sp.add_argument("--X")
    sp.add_argument("--sampler", default="balls:6")
    sp.add_argument("--trials", type=int, default=100)

    sp = add("freepair", cmd_freepair, "free pair search or single-pair check")
    sp.add_argument("--set")
    sp.add_argument("--group")
    sp.add_argument("--pair", nargs=2, metavar="ELEM")
    sp.add_argument("--mode", choices=[freecert.PING_PONG, freecert.NO_RELATION], default=freecert.NO_RELATION)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--L", type=int, default=10)

    sp = add("pipeline", cmd_pipeline, "end-to-end structure pipeline")
    sp.add_argument("--set", required=True)
    sp.add_argument("--K", required=True)
    sp.add_argument("--m", type=int, default=expansion.DEFAULT_M)
    sp.add_argument("--epsilon", default="1/10")
    sp.add_argument("--subgroup", default="whole")
    sp.add_argument("--core", default="auto", help="set file for the core set B, or 'auto'")
    sp.add_argument("--core-budget", type=int, default=64)
    sp.add_argument("--L", type=int, default=10)

    sp = add("verify", cmd_verify, "re-check a certificate file")
    sp.add_argument("--certificate", required=True)

    sp = add("verify-transcript", cmd_verify_transcript, "re-check a pipeline transcript")
    sp.add_argument("transcript")
    sp.add_argument("--no-rerun", action="store_true", help="skip replaying the pipeline")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    set_budget(args.budget)
    set_workers(args.jobs if args.jobs is not None else default_workers())
    if args.jobs is None:
        args.jobs = default_workers()
    try:
        _emit(args, args.func(args))
        return EXIT_OK
    except _Failed as exc:
        _emit_error(exc.report)
        return EXIT_FAIL
    except BudgetExceeded as exc:
        _emit_error({"error": exc.detail})
        return EXIT_BUDGET
    except PipelineInconsistency as exc:
        _emit_error({"error": exc.detail})
        return EXIT_FAIL
    except ApproxGroupError as exc:
        _emit_error({"error": exc.detail})
        return EXIT_INPUT
    except (OSError, ValueError, KeyError, TypeError) as exc:
        _emit_error({"error": {"message": f"{type(exc).__name__}: {exc}"}})
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
