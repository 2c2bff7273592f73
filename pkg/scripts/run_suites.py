"""Run every verification suite at its default size and print a summary table."""
import argparse
import sys
import time

from buresalg.suites import SUITES, run_suite


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("suites", nargs="*", default=list(SUITES))
    args = p.parse_args(argv)
    ok = True
    for name in args.suites:
        start = time.perf_counter()
        rep = run_suite(name, None, args.seed)
        worst = max((c.worst_residual for c in rep.checks.values()), default=0.0)
        print(f"{name:14s} {'PASS' if rep.passed else 'FAIL'}  trials={rep.trials:<5d} "
              f"worst={worst:.2e}  {time.perf_counter() - start:.1f}s")
        ok &= rep.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
