"""Effect of the anchoring constant gamma on P-AGD: final certificate, fitted
slope and the ratio of the observed residual to the theorem bound.

    python scripts/gamma_sweep.py --problem box-linear-50 --T 20000
"""
import argparse

import numpy as np

from pagd.algorithms import run
from pagd.analysis import fit_rate
from pagd.problems import BUILTINS, builtin


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--problem", default="box-linear-50", choices=sorted(BUILTINS))
    ap.add_argument("--T", type=int, default=20_000)
    ap.add_argument("--gammas", type=float, nargs="+", default=[2, 3, 5, 10, 20])
    args = ap.parse_args()

    p = builtin(args.problem)
    print(f"{'gamma':>6} {'cert(T)':>12} {'slope':>8} {'max cert/bound':>15}")
    for g in args.gammas:
        tr = run(p, "p-agd", args.T, gamma=g)
        fit = fit_rate(tr)
        ratio = np.nanmax(tr.cert_residual[1:] / tr.bound_thm[1:])
        print(f"{g:>6g} {tr.cert_residual[-1]:>12.4e} {fit.slope:>8.4f} {ratio:>15.4e}")


if __name__ == "__main__":
    main()
