#!/usr/bin/env python3
"""Print zero-flow convergence tables x_{n,l} for a few levels.

Each column is one flow: strictly decreasing in the cut-off n, with the
limit equal to the corresponding energy level.

Example:
    python3 scripts/flow_convergence.py --model rabi --kappa 0.2 --delta 0.4 --levels 1 3 10
"""

import argparse

from zeroflow import RabiParams, displaced_recurrence, flow_trace, rabi_recurrence


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--model", choices=("rabi", "displaced"), default="displaced")
    ap.add_argument("--kappa", type=float, default=0.2)
    ap.add_argument("--delta", type=float, default=0.4)
    ap.add_argument("--levels", type=int, nargs="+", default=[1, 2, 5])
    ap.add_argument("--schedule", type=int, nargs="+",
                    default=[8, 12, 18, 27, 40, 60, 90, 135])
    args = ap.parse_args()

    if args.model == "rabi":
        rec = rabi_recurrence(RabiParams(kappa=args.kappa, delta=args.delta))
    else:
        rec = displaced_recurrence(args.kappa)

    traces = {}
    for l in args.levels:
        schedule = [n for n in args.schedule if n >= l]
        traces[l] = dict(flow_trace(rec, l, schedule, tol=1e-12).history)

    header = "     n " + "".join(f"  x_(n,{l:d})".rjust(24) for l in args.levels)
    print(header)
    for n in args.schedule:
        row = f"{n:6d} "
        for l in args.levels:
            row += f"{traces[l][n]:24.16f}" if n in traces[l] else " " * 24
        print(row)


if __name__ == "__main__":
    main()
