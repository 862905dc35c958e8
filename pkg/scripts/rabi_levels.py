#!/usr/bin/env python3
"""Deep Rabi spectra per parity subspace, plus the lattice-distance report.

Examples:
    python3 scripts/rabi_levels.py --kappa 0.2 --delta 0.4 --levels 1000
    python3 scripts/rabi_levels.py --kappa 1.0 --delta 0.7 --levels 200 --tol 1e-8
"""

import argparse
import time

import numpy as np

from zeroflow import RabiParams, rabi_recurrence, run_flows, solvability_distance


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kappa", type=float, default=0.2)
    ap.add_argument("--delta", type=float, default=0.4)
    ap.add_argument("--levels", type=int, default=1000)
    ap.add_argument("--tol", type=float, default=1e-6)
    ap.add_argument("--fit-levels", type=int, default=50, help="levels used for the lattice fit")
    args = ap.parse_args()

    for parity in "+-":
        rec = rabi_recurrence(RabiParams(kappa=args.kappa, delta=args.delta, parity=parity))
        t0 = time.perf_counter()
        res = run_flows(rec, args.levels, tol=args.tol)
        dt = time.perf_counter() - t0
        xi = res.xi
        print(f"parity {parity}: {args.levels} levels in {dt:.1f}s "
              f"(complete={res.complete}, final cut-off n={res.levels[-1].n_converged})")
        print(f"  first: {xi[:4]}")
        print(f"  last:  {xi[-2:]}")
        gaps = np.diff(xi)
        print(f"  level spacing: min {gaps.min():.6f}, max {gaps.max():.6f}")
        family, residual = solvability_distance(xi[: args.fit_levels])
        print(f"  lattice distance over first {args.fit_levels} levels: "
              f"best family '{family}', rms residual {residual:.3e}")


if __name__ == "__main__":
    main()
