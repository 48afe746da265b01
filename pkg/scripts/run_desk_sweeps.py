#!/usr/bin/env python3
"""Reproduce the desk-scale trade-off tables as CSV files.

Two sweeps over the shipped 20-AP profile:
  * NMSE/SER versus the privacy budget epsilon, all five methods;
  * NMSE/SER versus the payload length tau_d at epsilon=1.

The non-private and pilot-only rows are flat along the epsilon axis by
construction; they are run across the full grid anyway so the CSV can be
plotted without special cases.  Expect a few minutes at 50 trials.
"""

import argparse
import sys
import time
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from privcell.config import load_experiment  # noqa: E402
from privcell.harness import emit_csv, run_sweep  # noqa: E402

EPS_VALUES = (0.1, 0.5, 1.0, 5.0, 10.0)
TAU_VALUES = (20.0, 40.0, 80.0, 160.0)

SWEEPS = {
    "epsilon": (EPS_VALUES, ("fw", "svd", "npfw", "npsvd", "po")),
    "tau_d": (TAU_VALUES, ("fw", "svd", "po")),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=str(ROOT / "configs" / "desk.yaml"))
    ap.add_argument("--sweep", choices=("epsilon", "tau_d", "both"), default="both")
    ap.add_argument("--trials", type=int, help="override the config trial count")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out-dir", default=str(ROOT / "results"))
    args = ap.parse_args()

    exp = load_experiment(args.config)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    axes = ("epsilon", "tau_d") if args.sweep == "both" else (args.sweep,)
    for axis in axes:
        values, methods = SWEEPS[axis]
        records = []
        t0 = time.perf_counter()
        for method in methods:
            records += run_sweep(
                exp, method=method, axis=axis, values=values,
                trials=args.trials, workers=args.workers,
            )
            print(f"  {axis}/{method} done ({time.perf_counter() - t0:.0f}s)")
        out = out_dir / f"desk_{axis}.csv"
        emit_csv(records, out)
        print(f"wrote {out} ({len(records)} rows)")


if __name__ == "__main__":
    main()
