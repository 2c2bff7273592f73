"""Command-line front end.

    buresalg --scenario FILE [--format json|table] [--tol T] [--seed N] [--output PATH]
    buresalg --suite NAME|all [--trials N] [--seed N] [--tol T] [--format json|table]

Exit codes: 0 all checks pass, 1 some analysis or suite check failed,
2 the input could not be parsed or validated.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .errors import (ParseError, UnknownAnalysis, UnknownSuite, ValidationError)
from .scenario import dumps, run_scenario
from .suites import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="buresalg",
                                description="Transition probability and Bures distance toolkit.")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenario", help="JSON scenario file")
    src.add_argument("--suite", help=f"verification suite: {', '.join(SUITES)} or all")
    p.add_argument("--trials", type=int, default=None, help="suite trials (default per suite)")
    p.add_argument("--seed", type=int, default=None,
                   help="random seed (suites default to 7, scenarios to their own seed)")
    p.add_argument("--tol", type=float, default=None,
                   help="tolerance override: scenario expectations, or every suite check")
    p.add_argument("--format", choices=("json", "table"), default="table")
    p.add_argument("--output", help="also write the JSON report to this path")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def suites_report(names, trials, seed, tol) -> dict:
    reports = [run_suite(n, trials, seed, tol).as_dict() for n in names]
    return {"kind": "suites",
            "provenance": {"version": __version__, "seed": seed, "trials": trials,
                           "tolerances": {"override": tol}},
            "suites": reports,
            "summary": {"suites": len(reports), "failed": sum(not r["passed"] for r in reports),
                        "passed": all(r["passed"] for r in reports)}}


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, list) and len(v) == 2 and all(isinstance(t, float) for t in v):
        return f"{v[0]:.6g}{v[1]:+.3g}j"
    return str(v)


def _columns(rows: list[list[str]]) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows) + "\n"


def render_table(report: dict) -> str:
    if report["kind"] == "scenario":
        rows = [["#", "analysis", "status", "values"]]
        for r in report["results"]:
            scalars = {k: v for k, v in r["values"].items()
                       if isinstance(v, (int, float, str, bool)) or v is None}
            vals = ", ".join(f"{k}={_fmt(v)}" for k, v in sorted(scalars.items()))
            rows.append([str(r["index"]), r["label"], r["status"], vals])
            for c in r["checks"]:
                if not c["passed"]:
                    rows.append(["", "", "", f"FAIL {c['name']}: residual {_fmt(c['residual'])} "
                                             f"> {_fmt(c['tolerance'])}"])
        head = f"scenario {report['provenance']['scenario']} (seed {report['provenance']['seed']})\n"
    else:
        rows = [["suite", "check", "count", "failures", "worst residual", "tolerance"]]
        for s in report["suites"]:
            for name, c in s["checks"].items():
                rows.append([s["suite"], name, str(c["count"]), str(c["failures"]),
                             f"{c['worst_residual']:.3e}", f"{c['tolerance']:.1e}"])
            rows.append([s["suite"], "PASS" if s["passed"] else "FAIL", str(s["trials"]), "", "", ""])
        head = f"suites (seed {report['provenance']['seed']})\n"
    result = "PASS" if report["summary"]["passed"] else "FAIL"
    return head + _columns(rows) + f"overall: {result}\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.scenario:
            report = run_scenario(args.scenario, args.tol, args.seed)
        else:
            names = list(SUITES) if args.suite == "all" else [args.suite]
            for n in names:
                if n not in SUITES:
                    raise UnknownSuite(f"unknown suite {n!r}; known: {', '.join(SUITES)} or all")
            if args.trials is not None and args.trials < 0:
                raise ValidationError("--trials must be non-negative", "trials")
            report = suites_report(names, args.trials, 7 if args.seed is None else args.seed,
                                   args.tol)
    except (ParseError, ValidationError, UnknownAnalysis, UnknownSuite) as exc:
        kind = type(exc).__name__
        extra = f" [{exc.invariant}]" if isinstance(exc, ValidationError) and exc.invariant else ""
        print(f"error: {kind}: {exc}{extra}", file=sys.stderr)
        return EXIT_INPUT
    text = dumps(report)
    if args.output:
        Path(args.output).write_text(text)
    sys.stdout.write(text if args.format == "json" else render_table(report))
    return EXIT_OK if report["summary"]["passed"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
