#!/usr/bin/env python3
"""Reproduce the full experiment set into results/ and render the figures.

Scales are moderate by default so the whole run finishes in tens of minutes
on one core; pass --quick for a fast smoke pass or --arrivals/--reps to
change scale.  Figures are rendered when bulkresv-plots is installed.
"""

import argparse
import subprocess
import sys
from pathlib import Path

FIGURES = {
    "motivation": ("fail-block-vs-load", None),
    "single-link": ("blocking-vs-load", None),
    "single-link-flowtime": ("flowtime-vs-load", "single-link"),
    "star": ("blocking-vs-load", None),
    "star-flowtime": ("flowtime-vs-load", "star"),
    "intervals": ("intervals-vs-n", None),
}


def run(cmd):
    print("+", " ".join(cmd), flush=True)
    subprocess.run(cmd, check=True)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smoke scale")
    parser.add_argument("--arrivals", type=int, default=50000)
    parser.add_argument("--reps", type=int, default=5)
    parser.add_argument("--seed", type=int, default=20250810)
    parser.add_argument("--outdir", default="results")
    args = parser.parse_args()

    arrivals = 2000 if args.quick else args.arrivals
    reps = 2 if args.quick else args.reps
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    scale = ["--arrivals", str(arrivals), "--reps", str(reps), "--seed", str(args.seed)]
    run([sys.executable, "-m", "bulkresv.cli", "motivation",
         "--out", str(outdir / "motivation.csv"), *scale])
    run([sys.executable, "-m", "bulkresv.cli", "single-link",
         "--out", str(outdir / "single-link.csv"), *scale])
    run([sys.executable, "-m", "bulkresv.cli", "star", "--n", "10",
         "--out", str(outdir / "star.csv"), *scale])
    run([sys.executable, "-m", "bulkresv.cli", "intervals", "--n", "10", "20", "40",
         "--loads", "0.8", "1.0", "--out", str(outdir / "intervals.csv"), *scale])
    run([sys.executable, "-m", "bulkresv.cli", "oracle-check",
         *(["--arrivals", "20000", "--reps", "3"] if args.quick else []),
         "--seed", str(args.seed)])

    try:
        import bulkresv_plots  # noqa: F401
    except ImportError:
        print("bulkresv-plots not installed; skipping figures")
        return
    for name, (kind, csv_name) in FIGURES.items():
        csv_path = outdir / f"{csv_name or name}.csv"
        run([sys.executable, "-m", "bulkresv_plots.cli", "--csv", str(csv_path),
             "--kind", kind, "--out", str(outdir / f"{name}.png")])


if __name__ == "__main__":
    main()
