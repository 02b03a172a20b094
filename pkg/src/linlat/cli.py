"""Command line entry point: ``linlat <command> ...``.

Exit codes: 0 pass, 1 fail, 2 usage, 3 budget exhausted, 4 out of guard.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .errors import BudgetExceeded, LinlatError, OutOfGuard
from .families import load_family
from .lattice import build_lattice
from .posets import parse_forbidden, parse_poset_dsl
from .qarith import q_binomial

SCHEMA = "linlat.report/1"

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET, EXIT_GUARD = 0, 1, 2, 3, 4


def _jsonable(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def render_document(command: str, config: dict, result: dict) -> str:
    doc = {"schema": SCHEMA, "command": command, "config": config, "result": result}
    return json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n"


def _emit(args, text: str) -> None:
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dims(text: Optional[str]):
    if text is None:
        return None
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"dimension range must look like LO:HI, got {text!r}") from None
    return (lo, hi)


def _forbidden(args):
    posets = list(parse_forbidden(args.forbid)) if args.forbid else []
    posets += [parse_poset_dsl(text) for text in args.poset or []]
    if not posets:
        raise argparse.ArgumentTypeError("give --forbid or --poset")
    return posets


# -- commands ------------------------------------------------------------------

def cmd_qbinom(args) -> int:
    print(q_binomial(args.n, args.k, args.q))
    return EXIT_PASS


def cmd_search(args) -> int:
    from .search import SearchProblem, solve

    L = build_lattice(args.n, args.q)
    prob = SearchProblem(
        L,
        _forbidden(args),
        induced=args.induced,
        dim_range=args.dims,
        mode="enumerate-extremal" if args.enumerate_extremal else "max-size",
        node_limit=args.node_limit,
        time_limit=args.time_limit,
    )
    report = solve(prob, workers=args.threads)
    if args.format == "json":
        _emit(args, render_document("search", prob.config(), report.to_json()))
    else:
        lines = [
            f"L({args.n},{args.q}) forbid {', '.join(map(str, prob.forbidden))}"
            f" ({'induced' if args.induced else 'weak'}), dims {prob.dim_range[0]}..{prob.dim_range[1]}",
            f"optimum: {report.optimum}",
            f"completed: {str(report.completed).lower()}",
            f"nodes: {report.nodes_explored}",
        ]
        fams = report.extremal if args.enumerate_extremal else [report.witness]
        label = "extremal" if args.enumerate_extremal else "witness"
        lines.append(f"{label} families: {len(fams)}")
        for F in fams:
            body = " ".join("[" + ",".join("".join(map(str, r)) for r in s.rows) + "]" for s in F.subspaces())
            lines.append(f"  levels {F.level_counts()}: {body}")
        _emit(args, "\n".join(lines) + "\n")
    if not report.completed:
        return EXIT_BUDGET
    return EXIT_PASS


def cmd_verify(args) -> int:
    from .verify import verify_theorem

    params = {
        "n": args.n,
        "q": args.q,
        "k": args.k,
        "l": args.l,
        "count": args.count,
        "seed": args.seed,
        "node_limit": args.node_limit,
    }
    verdict = verify_theorem(args.theorem, workers=args.threads, **params)
    config = {"theorem": args.theorem, **{k: v for k, v in params.items() if v is not None}}
    if args.format == "json":
        _emit(args, render_document("verify", config, verdict.to_json()))
    else:
        lines = [f"{args.theorem}: {verdict.status}"]
        for c in verdict.claims:
            mark = "ok" if c.ok else "FAILED"
            lines.append(f"  {c.name}: expected {c.expected}, observed {c.observed} [{mark}]")
        lines += [f"  note: {note}" for note in verdict.notes]
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_PASS if verdict.passed else EXIT_FAIL


def _simple_family(spec: str, n: int):
    from .lym import boolean_family, cyclic_interval, double_chain, interval_chain, maximal_chain

    if spec == "cyclic":
        return cyclic_interval(n).realized
    if spec == "double":
        return double_chain(n).realized
    if spec == "chain":
        return maximal_chain(n).realized
    if spec == "boolean":
        return boolean_family(n)
    if spec.startswith("interval:"):
        return interval_chain(n, int(spec.split(":", 1)[1])).realized
    raise argparse.ArgumentTypeError(f"unknown structure {spec!r}")


def cmd_lym(args) -> int:
    from .lym import alpha, interval_chain_alpha_check, lym_check

    config = {"action": args.action, "n": args.n, "q": args.q, "H": args.H, "forbid": args.forbid, "induced": args.induced}
    if args.action == "alpha":
        H = _simple_family(args.H, args.n)
        result = {"alpha": alpha(H, _forbidden(args), args.induced), "size": len(H), "level_counts": H.level_counts()}
        ok = True
    elif args.action == "check":
        if not args.family:
            raise argparse.ArgumentTypeError("lym check needs --family")
        F = load_family(args.family)
        H = _simple_family(args.H, F.lattice.n)
        verdict = lym_check(F, H, _forbidden(args), args.induced)
        result = verdict.to_json()
        ok = verdict.holds
    else:
        posets = _forbidden(args)
        verdicts = [interval_chain_alpha_check(args.k, args.n, P, args.induced) for P in posets]
        config["k"] = args.k
        result = {"verdicts": [v.to_json() for v in verdicts]}
        ok = all(v.status != "violation" for v in verdicts)
    if args.format == "json":
        _emit(args, render_document("lym", config, result))
    else:
        _emit(args, "\n".join(f"{k}: {v}" for k, v in _jsonable(result).items()) + "\n")
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_pushdown(args) -> int:
    from .transforms import dual_pushup, pushdown
    from .verify import pushdown_suite

    if args.family:
        F = load_family(args.family)
        op = dual_pushup if args.up else pushdown
        kw = {"ceiling": args.level} if args.up else {"floor": args.level}
        G, steps = op(F, args.induced, args.k, args.l, **kw)
        config = {"family": args.family, "k": args.k, "l": args.l, "induced": args.induced, "up": args.up, "level": args.level}
        result = {"family": G.to_json(), "steps": [s.to_json() for s in steps]}
        ok = True
    else:
        res = pushdown_suite(args.n, args.q, args.k, args.l, args.count, args.seed, args.threads, args.level)
        config = {"n": args.n, "q": args.q, "k": args.k, "l": args.l, "count": args.count, "seed": args.seed, "level": args.level}
        result = res
        ok = res["hall_failures"] == 0 and res["passed"] == res["count"]
    if args.format == "json":
        _emit(args, render_document("pushdown", config, result))
    else:
        if args.family:
            _emit(args, f"steps: {len(result['steps'])}\nresult levels: {G.level_counts()}\n")
        else:
            _emit(args, f"cases: {result['count']}\npassed: {result['passed']}\nhall failures: {result['hall_failures']}\n")
    return EXIT_PASS if ok else EXIT_FAIL


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="linlat", description="Forbidden subposet problems in the subspace lattice L(n, q).")
    sub = parser.add_subparsers(dest="command", required=True)

    def output_flags(p):
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--output", help="write the report here instead of stdout")
        p.add_argument("--threads", type=int, default=1, help="worker processes; output does not depend on it")
        p.add_argument("--seed", type=int, default=None, help="seed for randomized suites")

    def forbid_flags(p):
        p.add_argument("--forbid", help="comma-separated posets such as V:2,L:2 or Y:2,Y':2 or B or C:3")
        p.add_argument("--poset", action="append", help="poset as 'elements: a,b,c; relations: a<c, b<c' (repeatable)")
        p.add_argument("--induced", action="store_true")

    p = sub.add_parser("qbinom", help="Gaussian binomial [n choose k]_q")
    p.add_argument("n", type=int)
    p.add_argument("k", type=int)
    p.add_argument("q", type=int)
    p.set_defaults(func=cmd_qbinom)

    p = sub.add_parser("search", help="exact La_q / La*_q by branch and bound")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    forbid_flags(p)
    p.add_argument("--dims", type=_dims, help="inclusive dimension range LO:HI")
    p.add_argument("--enumerate-extremal", action="store_true")
    p.add_argument("--node-limit", type=int)
    p.add_argument("--time-limit", type=float)
    output_flags(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("verify", help="check a stated result at desk scale")
    p.add_argument("theorem")
    for flag in ("--n", "--q", "--k", "--l", "--count", "--node-limit"):
        p.add_argument(flag, type=int)
    output_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lym", help="alpha(H, P), the LYM-type inequality, interval-chain closed forms")
    p.add_argument("action", choices=("alpha", "check", "interval"))
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--H", default="cyclic", help="cyclic, double, chain, boolean or interval:K")
    p.add_argument("--family", help="family JSON file for 'check'")
    forbid_flags(p)
    output_flags(p)
    p.set_defaults(func=cmd_lym)

    p = sub.add_parser("pushdown", help="matching pushdown of a family, or the random property suite")
    p.add_argument("--family", help="family JSON file; without it the random suite runs")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--l", type=int, default=2)
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--level", type=int, help="floor (or ceiling with --up)")
    p.add_argument("--up", action="store_true", help="raise members instead")
    p.add_argument("--induced", action="store_true")
    output_flags(p)
    p.set_defaults(func=cmd_pushdown)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", None) is None and args.command == "pushdown":
        args.seed = 0
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be at least 1")
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except OutOfGuard as exc:
        print(f"out of guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (LinlatError, argparse.ArgumentTypeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
