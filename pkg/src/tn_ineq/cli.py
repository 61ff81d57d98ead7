"""Command line entry point ``tn-ineq``.

Exit codes: 0 holds / agrees, 1 falsified / disagrees, 2 inconclusive,
64 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import families
from .errors import TNIneqError
from .expr_core import apply_sequence, expr_from_json, expr_to_json, ops_to_json, parse_ops
from .harness import VerifyConfig, oracle_compare, verify
from .multiplicative import (
    SmallestMultQuery,
    decide,
    decide_via_setops,
    falsify_search,
    reduce_to_complementary,
    to_principal_form,
)
from .planar_net import build_network, to_dot
from .tn_matrix import factorization_from_json, factorization_to_json, sample_factorization

EXIT_OK, EXIT_FALSE, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 64


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with 2, which means "inconclusive" here
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _load(path: str) -> dict:
    return json.loads(Path(path).read_text())


def _emit(obj, out: str | None = None) -> None:
    text = json.dumps(obj, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _family_expr(args):
    params = _load(args.params) if args.params else {}
    for key in ("n", "l", "i", "j"):
        val = getattr(args, key, None)
        if val is not None:
            params[key] = val
    return families.from_params(args.family, params)


def cmd_verify(args) -> int:
    if args.expr:
        e = expr_from_json(_load(args.expr))
    elif args.family:
        e = _family_expr(args)
    else:
        raise TNIneqError("verify needs --family or --expr")
    bounds = [args.weight_bound] if args.weight_bound else [1, 3, 10]
    summary = []
    failed = False
    for w in bounds:
        rep = verify(e, VerifyConfig(e.n, args.samples, w, args.seed, args.nonsingular_only))
        summary.append(
            {
                "weight_bound": w,
                "checked": rep.checked,
                "violations": len(rep.violations),
                "min_value": str(rep.min_value_seen),
            }
        )
        if rep.violations:
            failed = True
            summary[-1]["counterexample"] = factorization_to_json(rep.violations[0][0])
            break
    _emit({"expr": str(e), "runs": summary})
    return EXIT_FALSE if failed else EXIT_OK


def cmd_decide(args) -> int:
    q = SmallestMultQuery.from_json(_load(args.query))
    v = decide_via_setops(q) if args.method == "setops" else decide(q)
    out = v.to_json()
    pf = to_principal_form(q)
    out["principal_form"] = {"R1": list(pf.R1), "R2": list(pf.R2), "K1": list(pf.K1), "K2": list(pf.K2)}
    _emit(out)
    return EXIT_OK if v.holds else EXIT_FALSE


def cmd_falsify(args) -> int:
    if args.query:
        target = SmallestMultQuery.from_json(_load(args.query))
        if args.principal:
            target = to_principal_form(target)
    elif args.expr:
        target = expr_from_json(_load(args.expr))
    else:
        raise TNIneqError("falsify needs --expr or --query")
    depth = None if args.max_depth < 0 else args.max_depth
    ops = falsify_search(target, depth)
    if ops is None:
        _emit({"witness": None})
        return EXIT_INCONCLUSIVE
    _emit({"witness": {"ops": ops_to_json(ops)}, "ops": ";".join(map(str, ops))})
    return EXIT_FALSE


def cmd_apply(args) -> int:
    e = expr_from_json(_load(args.expr))
    out = apply_sequence(e, parse_ops(args.ops))
    _emit(expr_to_json(out), args.out)
    return EXIT_OK


def cmd_family(args) -> int:
    params = _load(args.params) if args.params else {}
    e = families.from_params(args.name, params)
    _emit(expr_to_json(e), args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    bad = 0
    for t in range(args.trials):
        f = sample_factorization(args.n, args.seed + t, args.weight_bound)
        bad += len(oracle_compare(f))
    _emit({"n": args.n, "trials": args.trials, "mismatches": bad})
    return EXIT_OK if bad == 0 else EXIT_FALSE


def cmd_reduce(args) -> int:
    q = SmallestMultQuery.from_json(_load(args.query))
    r = reduce_to_complementary(q)
    _emit(
        {
            "ancestor": r.ancestor.to_json(),
            "row_ops": ops_to_json(r.row_ops),
            "col_ops": ops_to_json(r.col_ops),
        }
    )
    return EXIT_OK


def cmd_network(args) -> int:
    f = factorization_from_json(_load(args.factorization))
    dot = to_dot(build_network(f))
    if args.out:
        Path(args.out).write_text(dot)
    else:
        sys.stdout.write(dot)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tn-ineq", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="sample TN matrices and check an inequality")
    v.add_argument("--family", choices=families.FAMILY_NAMES)
    v.add_argument("--params", help="JSON file with family parameters")
    v.add_argument("--expr", help="JSON file with an expression")
    v.add_argument("--n", type=int)
    v.add_argument("--l", type=int)
    v.add_argument("--i", type=int)
    v.add_argument("--j", type=int)
    v.add_argument("--samples", type=int, default=200)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--weight-bound", type=int, help="single bound instead of escalating 1,3,10")
    v.add_argument("--nonsingular-only", action="store_true")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("decide", help="decide a two-by-two product inequality")
    d.add_argument("--query", required=True)
    d.add_argument("--method", choices=("windows", "setops"), default="windows")
    d.set_defaults(func=cmd_decide)

    f = sub.add_parser("falsify", help="search for shifts that make an inequality false")
    f.add_argument("--expr")
    f.add_argument("--query")
    f.add_argument("--principal", action="store_true", help="search on the principal-minor form")
    f.add_argument("--max-depth", type=int, default=6, help="negative for unbounded")
    f.set_defaults(func=cmd_falsify)

    a = sub.add_parser("apply", help="apply row/column shifts to an expression")
    a.add_argument("--expr", required=True)
    a.add_argument("--ops", required=True, help='e.g. "R1,2;C3,4"')
    a.add_argument("--out")
    a.set_defaults(func=cmd_apply)

    fam = sub.add_parser("family", help="emit a family instance as JSON")
    fam.add_argument("--name", required=True, choices=families.FAMILY_NAMES)
    fam.add_argument("--params", required=True)
    fam.add_argument("--out")
    fam.set_defaults(func=cmd_family)

    o = sub.add_parser("oracle", help="compare the three minor computations")
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--trials", type=int, default=100)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--weight-bound", type=int, default=3)
    o.set_defaults(func=cmd_oracle)

    r = sub.add_parser("reduce", help="reduce a holding query to a complementary one")
    r.add_argument("--query", required=True)
    r.set_defaults(func=cmd_reduce)

    nw = sub.add_parser("network", help="export the planar network of a factorization as DOT")
    nw.add_argument("--factorization", required=True)
    nw.add_argument("--out")
    nw.set_defaults(func=cmd_network)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, TypeError, OSError) as exc:
        print(f"tn-ineq: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
