"""Run P-AGD on every builtin instance and audit each inequality of the analysis.

    python scripts/audit_builtins.py --T 100000
"""
import argparse
import sys
import time

from pagd.algorithms import run
from pagd.analysis import audit_trace
from pagd.problems import BUILTINS, builtin


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--T", type=int, default=100_000)
    ap.add_argument("--gamma", type=float, default=2.0)
    args = ap.parse_args()

    failed = False
    for name in sorted(BUILTINS):
        p = builtin(name)
        t0 = time.perf_counter()
        tr = run(p, "p-agd", args.T, gamma=args.gamma)
        reports = audit_trace(tr, p)
        print(f"{name}  ({time.perf_counter() - t0:.1f}s)")
        for r in reports:
            extra = r.details.get("max_ratio")
            print(f"    {r}" + ("" if extra is None else f"  max_ratio={extra:.4f}"))
            failed |= r.passed is False
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()
