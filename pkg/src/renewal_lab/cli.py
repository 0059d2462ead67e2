"""``renewal-lab`` command line.

Exit codes: 0 success, 1 a property or probe failed, 2 invalid usage or input.
JSON is the stable output; text tables are for people.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import shlex
import sys
from typing import Optional, Sequence

from renewal_lab import __version__
from renewal_lab.checks import run_suite
from renewal_lab.conjecture import dominance_search, no_largest_demo
from renewal_lab.errors import LPInfeasible, LPUnbounded, RenewalLabError
from renewal_lab.masses import SamplePlan, make_masses, period
from renewal_lab.mc import cross_check
from renewal_lab.polylab import MultiPoly, build_P, build_Q, in_A_class, in_A_hat_class
from renewal_lab.rational import format_rational, parse_rational_list
from renewal_lab.renewal import (
    compute_renewal,
    envelopes,
    extremes,
    renewal_report,
    verify_extremes_window,
)

SCHEMA_VERSION = "1"


class CommandFailed(Exception):
    """Carries a finished report whose property verdict is negative."""

    def __init__(self, payload):
        self.payload = payload


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("RENEWAL_LAB_JOBS", "1")))
    except ValueError:
        return 1


def _masses(args):
    return make_masses(parse_rational_list(args.masses))


def _plan(args) -> SamplePlan:
    if getattr(args, "random", None):
        return SamplePlan.random(args.random, args.seed)
    return SamplePlan.grid(args.grid)


def _table(rows: Sequence[Sequence[object]]) -> str:
    cells = [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(cells[0]))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells)


def _csv(rows: Sequence[Sequence[object]]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


# each command returns (json result, csv rows or None, text)


def cmd_compute(args):
    m = _masses(args)
    report = renewal_report(m, args.n)
    seq = compute_renewal(m, args.n)
    env = envelopes(seq) if args.n >= m.k else None
    rows = [["n", "u_n", "b_n", "c_n"]]
    for n, u in enumerate(seq.u):
        b = c = ""
        if env is not None and n >= env.start:
            b, c = (format_rational(x) for x in env.at(n))
        rows.append([n, format_rational(u), b, c])
    text = _table(rows)
    if report["limit"] is None:
        text += "\n" + report["note"]
    else:
        text += f"\nlimit 1/E[X] = {report['limit']}"
    return report, rows, text


def cmd_extremes(args):
    m = _masses(args)
    ext = extremes(m)
    result = {"masses": m.to_json(), **ext.to_json(), "period": period(m)}
    if args.horizon is not None:
        result["window"] = verify_extremes_window(m, args.horizon).to_json()
    text = f"M = {result['M']} at n={ext.argmax}\nm = {result['m']} at n={ext.argmin}"
    if "window" in result:
        text += f"\nstrict inequalities up to {args.horizon}: {result['window']['holds']}"
    return result, None, text


def cmd_poly(args):
    if args.family == "P":
        if args.l is None:
            raise RenewalLabError("poly P needs --l")
        entry = build_P(args.l, args.k)
        poly = entry.composition_form if args.form == "composition" else entry.substituted
        label = f"P_{args.l}"
    else:
        if args.n is None:
            raise RenewalLabError("poly Q needs --n")
        poly = build_Q(args.n, args.k)
        label = f"Q_{args.n}"
    result = {
        "name": label,
        "k": args.k,
        "form": args.form if args.family == "P" else "substituted",
        "text": poly.to_text(),
        "degree": poly.degree() if not poly.is_zero() else None,
        "poly": poly.to_json(),
    }
    return result, None, poly.to_text()


def cmd_classes(args):
    poly = MultiPoly.from_text(args.poly, args.k - 1)
    plan = _plan(args)
    a = in_A_class(poly, args.k, plan)
    a_hat = in_A_hat_class(poly, args.k, plan)
    result = {"poly": poly.to_text(), "k": args.k, "plan": plan.to_json(), "A": a.to_json(), "A_hat": a_hat.to_json()}
    text = f"A class: {a.status} {a.reason}\nA-hat class: {a_hat.status} {a_hat.reason}"
    return result, None, text


def cmd_probe(args):
    res = dominance_search(args.k, args.cls, SamplePlan.grid(args.grid))
    result = res.to_json()
    text = (
        f"objective {res.objective!r}\ncandidate {res.best_candidate.to_text()}\n"
        f"exact recheck on grid {res.exact_recheck.plan.resolution}: {res.exact_recheck.verdict}"
        f" {res.exact_recheck.detail}"
    )
    return result, None, text


def cmd_demo(args):
    report = no_largest_demo(args.k, scan=SamplePlan.grid(args.scan) if args.scan else None)
    result = report.to_json()
    lines = [
        f"region {c.l}: p0={[format_rational(x) for x in c.p0.q]} a={format_rational(c.a)} "
        f"margin={format_rational(c.margin)}"
        for c in report.certificates
    ]
    return result, None, "\n".join(lines + [report.explanation()])


def cmd_mc(args):
    m = _masses(args)
    res = cross_check(m, args.n, args.walks, args.seed, z=args.z, jobs=args.jobs)
    result = res.to_json()
    rows = res.csv_rows()
    text = _table(rows) + f"\n{'pass' if res.passed else 'FAIL'} (worst z {res.worst_z:.3f})"
    if not res.passed:
        raise CommandFailed((result, rows, text))
    return result, rows, text


def cmd_verify_all(args):
    suite = run_suite(args.budget, args.seed)
    rows = [["claim", "check", "passed", "checked", "detail"]]
    for r in suite["results"]:
        rows.append([r["claim"], r["name"], r["passed"], r["checked"], r["detail"]])
    text = "\n".join(
        f"[{'PASS' if r['passed'] else 'FAIL'}] {r['claim']} ({r['checked']} checked) {r['detail']}"
        for r in suite["results"]
    )
    if not suite["passed"]:
        raise CommandFailed((suite, rows, text))
    return suite, rows, text


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="renewal-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default=None)
    common.add_argument("--output", "-o", default=None, help="write the report here instead of stdout")
    common.add_argument("--jobs", type=int, default=_default_jobs(), help="worker processes (env RENEWAL_LAB_JOBS)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", parents=[common], help="renewal masses, envelopes and limit")
    p.add_argument("--masses", required=True, help="comma separated rationals p_1,...,p_k")
    p.add_argument("--n", type=int, default=20)
    p.set_defaults(func=cmd_compute, default_format="text")

    p = sub.add_parser("extremes", parents=[common], help="M_k, m_k and the strict window check")
    p.add_argument("--masses", required=True)
    p.add_argument("--horizon", type=int, default=None)
    p.set_defaults(func=cmd_extremes, default_format="text")

    p = sub.add_parser("poly", parents=[common], help="print P_l or Q_n")
    p.add_argument("family", choices=("P", "Q"))
    p.add_argument("--l", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--form", choices=("substituted", "composition"), default="substituted")
    p.set_defaults(func=cmd_poly, default_format="text")

    p = sub.add_parser("classes", parents=[common], help="try to refute class membership of a polynomial")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--poly", required=True, help='e.g. "1 * p1^2 + 1 * p1 * p2"')
    p.add_argument("--grid", type=int, default=32)
    p.add_argument("--random", type=int, default=0, help="use this many random points instead of a grid")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_classes, default_format="text")

    p = sub.add_parser("probe", parents=[common], help="dominance LP against Q_k")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--class", dest="cls", choices=("a", "a-hat"), default="a-hat")
    p.add_argument("--grid", type=int, default=32)
    p.set_defaults(func=cmd_probe, default_format="json")

    p = sub.add_parser("demo", parents=[common], help="perturbation certificates")
    p.add_argument("which", choices=("no-largest",))
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--scan", type=int, default=0, help="scan grid resolution (default 64 for k=3, else 12)")
    p.set_defaults(func=cmd_demo, default_format="text")

    p = sub.add_parser("mc", parents=[common], help="Monte Carlo cross-check of u_n")
    p.add_argument("--masses", required=True)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--walks", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--z", type=float, default=5.0)
    p.set_defaults(func=cmd_mc, default_format="text")

    p = sub.add_parser("verify-all", parents=[common], help="run every property suite")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--budget", choices=("tiny", "default", "full"), default="default")
    p.set_defaults(func=cmd_verify_all, default_format="json")
    return parser


def _reproduce_argv(argv: Sequence[str]) -> list[str]:
    # the destination file does not change the report
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
        elif a in ("-o", "--output"):
            skip = True
        elif not a.startswith("--output="):
            out.append(a)
    return out


def _render(args, argv, result, rows, text) -> str:
    fmt = args.format or args.default_format
    if fmt == "json":
        config = {
            k: v
            for k, v in vars(args).items()
            if k not in ("func", "output", "format", "default_format")
        }
        payload = {
            "schema_version": SCHEMA_VERSION,
            "command": args.command,
            "config": config,
            "reproduce": "renewal-lab " + " ".join(shlex.quote(a) for a in _reproduce_argv(argv)),
            "result": result,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        if rows is None:
            raise RenewalLabError(f"{args.command} has no CSV form; use json or text")
        return _csv(rows)
    return text + "\n"


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    status = 0
    try:
        try:
            result, rows, text = args.func(args)
        except CommandFailed as failed:
            result, rows, text = failed.payload
            status = 1
        out = _render(args, argv, result, rows, text)
    except (LPInfeasible, LPUnbounded) as exc:
        print(f"probe failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except RenewalLabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return status


if __name__ == "__main__":
    sys.exit(main())
