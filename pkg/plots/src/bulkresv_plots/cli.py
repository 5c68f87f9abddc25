"""Command line entry: bulkresv-plot --csv results.csv --kind blocking-vs-load --out fig.png"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .figures import FigureSpec, KINDS, PlotError, plot


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="bulkresv-plot", description=__doc__)
    parser.add_argument("--csv", required=True, help="sweep CSV from the simulator CLI")
    parser.add_argument("--kind", required=True, choices=sorted(KINDS))
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--group", default=None, help="series column (default: scheme)")
    parser.add_argument("--logy", action="store_true", help="logarithmic y axis")
    args = parser.parse_args(argv)

    group = args.group
    if group is None:
        group = "load" if args.kind == "intervals-vs-n" else "scheme"
    try:
        labels = plot(FigureSpec(args.csv, args.kind, args.out, group=group, logy=args.logy))
    except (PlotError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out} ({len(labels)} series)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
