"""Command line interface: render a simulator CSV into a figure."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .plots import FigureSpec, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dfrc-figures",
        description="Render holodfrc CSV outputs into figures")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("plot", help="render one CSV into one image")
    p.add_argument("--kind", choices=["convergence", "sweep"], required=True)
    p.add_argument("--in", dest="csv_path", type=Path, required=True)
    p.add_argument("--out", dest="out_path", type=Path, required=True)
    args = parser.parse_args(argv)

    try:
        series = render(FigureSpec(csv_path=args.csv_path, kind=args.kind,
                                   out_path=args.out_path))
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out_path} ({len(series)} series)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
