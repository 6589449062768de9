"""GD vs EG vs P-AGD on a problem instance; prints a table and writes an SVG.

    python scripts/landscape.py --problem rotation-unconstrained --T 10000 --svg landscape.svg
"""
import argparse

from pagd.algorithms import run
from pagd.plot import residual_svg
from pagd.problems import BUILTINS, builtin


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--problem", default="rotation-unconstrained", choices=sorted(BUILTINS))
    ap.add_argument("--T", type=int, default=10_000)
    ap.add_argument("--gamma", type=float, default=2.0)
    ap.add_argument("--svg", default=None)
    args = ap.parse_args()

    p = builtin(args.problem)
    traces = [run(p, m, args.T, gamma=args.gamma) for m in ("gd", "eg", "p-agd")]
    print(f"{'method':>6} {'last t':>8} {'tangent':>12} {'natural':>12} diverged")
    for tr in traces:
        i = tr.last
        print(f"{tr.method:>6} {i:>8d} {tr.tan_residual[i]:>12.3e} {tr.nat_residual[i]:>12.3e} {tr.diverged}")
    if args.svg:
        with open(args.svg, "w") as fh:
            fh.write(residual_svg(traces, title=f"{p.label}: tangent residual"))


if __name__ == "__main__":
    main()
