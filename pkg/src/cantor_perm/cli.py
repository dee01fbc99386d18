"""Command-line entry point.

Exit status: 0 success, 1 bad arguments, 2 capacity exceeded, 3 integrity
failure (a computed result contradicts a proven fact).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import gsets, linmon, measures, permcat, selftest
from .errors import ArgumentError, CantorPermError
from .exact import fmt_q
from .finsets import count_ample_power2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ArgumentError(f"{self.prog}: {message}")


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ArgumentError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ArgumentError(f"{path} is not valid JSON: {exc}") from exc


def _table(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise ArgumentError(f"bad map table {text!r}; expected comma-separated integers") from exc


def _pretty(obj, indent: int = 0) -> str:
    pad = " " * indent
    if isinstance(obj, dict):
        width = max((len(str(k)) for k in obj), default=0)
        lines = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{str(k):<{width}}")
                lines.append(_pretty(v, indent + 2))
            else:
                lines.append(f"{pad}{str(k):<{width}}  {v}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(_pretty(v, indent) if isinstance(v, (dict, list)) else f"{pad}{v}" for v in obj)
    return f"{pad}{obj}"


def cmd_ample_count(args):
    method = {"enum": "enumerate", "ie": "inclusion_exclusion"}[args.method]
    return {"n": args.n, "method": args.method, "count": count_ample_power2(args.n, method)}


def cmd_decompose_product(args):
    f, g = _table(args.f), _table(args.g)
    cod = args.cod if args.cod is not None else max(f + g, default=-1) + 1
    z = gsets.x_product_decompose(gsets.GMap.from_table(f, cod), gsets.GMap.from_table(g, cod))
    return {"summary": str(z), "pieces": z.to_json()}


def cmd_measure_eval(args):
    m = measures.measure_by_name(args.measure)
    s = gsets.FormalGSet.from_json(_load_json(args.gset))
    return {"measure": m.name, "value": fmt_q(measures.eval_measure(m, s))}


def cmd_measure_solve(args):
    return {"alphas": [str(a) for a in measures.solve_regular_parameters()]}


def cmd_perm_compose(args):
    lhs = permcat.PermMatrix.from_json(_load_json(args.lhs))
    rhs = permcat.PermMatrix.from_json(_load_json(args.rhs))
    mode = args.mode
    if mode == "fast" and any(o.y_shape() is None for o in (rhs.source, rhs.target, lhs.target)):
        mode = "lift"  # the semiring path exists only between Y-objects
    return permcat.compose(lhs, rhs, mode).to_json()


def cmd_perm_trace(args):
    mat = permcat.PermMatrix.from_json(_load_json(args.input))
    return {"measure": mat.measure.name, "mode": args.mode, "trace": fmt_q(permcat.trace(mat, args.mode))}


def cmd_alg_report(args):
    rep = linmon.semisimplicity_report(args.kind, args.n)
    out = rep.to_json()
    if not rep.semisimple and linmon.kind_of(args.kind) == linmon.kind_of("bool"):
        w = linmon.find_trace_witness(args.n, args.kind)
        if w is not None:
            out["witness"] = w.to_json()
    if args.out:
        Path(args.out).write_text(json.dumps(out, indent=2) + "\n")
    return out


def cmd_alg_witness(args):
    w = linmon.find_trace_witness(args.n, "bool")
    if w is None:
        return {"kind": "bool", "n": args.n, "witness": None}
    return {"kind": "bool", "n": args.n, **w.to_json()}


def cmd_classify(args):
    fam = gsets.EqRelFamily.from_json(_load_json(args.relation))
    q = gsets.eqrel_classify(fam)
    return {"base_size": q.base, "group_order": q.order, "group": [list(g) for g in q.group]}


def cmd_selftest(args):
    results = selftest.run(args.level)
    lines = [f"{'PASS' if r.ok else 'FAIL'}  {r.name:<28} {r.detail}" for r in results]
    failed = [r.name for r in results if not r.ok]
    summary = f"{len(results) - len(failed)}/{len(results)} checks passed"
    if failed:
        summary += "; failing: " + ", ".join(failed)
    print("\n".join(lines + [summary]))
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cantor-perm", description=__doc__.splitlines()[0])
    p.add_argument("--pretty", action="store_true", help="aligned text instead of JSON")
    verbs = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    ample = verbs.add_parser("ample").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    c = ample.add_parser("count", help="number of ample subsets of [2]^n")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--method", choices=["enum", "ie"], default="ie")
    c.set_defaults(func=cmd_ample_count)

    dec = verbs.add_parser("decompose").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    c = dec.add_parser("product", help="orbits of X(A) x_X(C) X(B)")
    c.add_argument("--f", required=True, help="value table of f: A -> C, e.g. 0,0,1")
    c.add_argument("--g", required=True, help="value table of g: B -> C")
    c.add_argument("--cod", type=int, default=None, help="size of C (default: largest value + 1)")
    c.set_defaults(func=cmd_decompose_product)

    meas = verbs.add_parser("measure").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    c = meas.add_parser("eval")
    c.add_argument("--measure", choices=["mu", "nu"], required=True)
    c.add_argument("--gset", required=True)
    c.set_defaults(func=cmd_measure_eval)
    c = meas.add_parser("solve")
    c.set_defaults(func=cmd_measure_solve)

    perm = verbs.add_parser("perm").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    c = perm.add_parser("compose", help="lhs o rhs")
    c.add_argument("--lhs", required=True)
    c.add_argument("--rhs", required=True)
    c.add_argument("--mode", choices=["oracle", "fast"], default="fast")
    c.set_defaults(func=cmd_perm_compose)
    c = perm.add_parser("trace")
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--mode", choices=["categorical", "closed"], default="categorical")
    c.set_defaults(func=cmd_perm_trace)

    alg = verbs.add_parser("alg").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    c = alg.add_parser("report")
    c.add_argument("--kind", choices=["f2", "bool"], required=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_alg_report)
    c = alg.add_parser("witness")
    c.add_argument("--n", type=int, default=3)
    c.set_defaults(func=cmd_alg_witness)

    c = verbs.add_parser("classify")
    c.add_argument("--relation", required=True)
    c.set_defaults(func=cmd_classify)

    c = verbs.add_parser("selftest")
    c.add_argument("--level", choices=["quick", "full"], default="quick")
    c.set_defaults(func=cmd_selftest)
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        result = args.func(args)
    except CantorPermError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    if isinstance(result, int):
        return result
    print(_pretty(result) if args.pretty else json.dumps(result))
    return 0


if __name__ == "__main__":
    sys.exit(main())
