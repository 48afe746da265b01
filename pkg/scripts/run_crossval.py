#!/usr/bin/env python3
"""Grid-search the completion knobs on a held-out seed family.

Scores the iterative method's round count over a small grid, and the
nuclear-norm budget over a 10-point uniform grid given as a fraction of
the derived bound.  Prints one table per parameter.
"""

import argparse
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

import numpy as np  # noqa: E402

from privcell.config import load_experiment  # noqa: E402
from privcell.fw import nuclear_norm_budget  # noqa: E402
from privcell.harness import cross_validate, draw_beta, prepare  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=str(ROOT / "configs" / "desk.yaml"))
    ap.add_argument("--method", default="fw", choices=("fw", "svd", "npfw", "npsvd"))
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--iters-grid", default="4,8,12,16,20")
    ap.add_argument("--nuc-fractions", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0")
    args = ap.parse_args()

    exp = load_experiment(args.config)
    scen = exp.scenario

    if args.method in ("fw", "npfw"):
        grid = [int(v) for v in args.iters_grid.split(",")]
        best, scores = cross_validate(exp, args.method, "fw_iters", grid, args.trials)
        print(f"\nround count ({args.method}, {args.trials} trials):")
        for value, score in scores:
            mark = " <-" if value == best else ""
            print(f"  T={value:<4d} nmse={score:.6f}{mark}")

    # nuclear-norm budget, expressed against the derived bound so the
    # fractions carry over between unit conventions
    beta = draw_beta(scen, scen.seed)
    derived = prepare(scen, exp.run, beta).nuc_bound
    physical = nuclear_norm_budget(beta, scen.tau_c, scen.N_a)
    fractions = [float(v) for v in args.nuc_fractions.split(",")]
    grid = [f * physical for f in fractions]
    best, scores = cross_validate(exp, args.method, "nuc_bound", grid, args.trials)
    print(f"\nnuclear budget ({args.method}, derived bound {derived:.3f} in working units):")
    for frac, (value, score) in zip(fractions, scores):
        mark = " <-" if value == best else ""
        print(f"  {frac:>4.2f} x bound  nmse={score:.6f}{mark}")
    idx = int(np.argmin([s for _, s in scores]))
    print(f"best fraction: {fractions[idx]:.2f}")


if __name__ == "__main__":
    main()
