"""Command line: qdiff1d-plots <kind> --in FILE [--soliton FILE] --out FILE

Exit codes: 0 success, 2 bad arguments or schema-mismatched/missing input.
"""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, FigureSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qdiff1d-plots",
                                 description="Render figures from qdiff1d CSV outputs")
    sub = ap.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind)
        p.add_argument("--in", dest="input", required=True, help="input CSV")
        p.add_argument("--out", dest="output", required=True, help="PNG or SVG path")
        if kind == "overlay":
            p.add_argument("--soliton", default=None,
                           help="optional soliton_overlay.csv for the front panel")
        if kind == "heatmap":
            p.add_argument("--times", default=None,
                           help="comma-separated snapshot panel times")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    inputs = [args.input]
    if getattr(args, "soliton", None):
        inputs.append(args.soliton)
    times = None
    if getattr(args, "times", None):
        times = [float(v) for v in args.times.split(",")]
    spec = FigureSpec(kind=args.kind, inputs=inputs, output=args.output,
                      snapshot_times=times)
    try:
        render(spec)
    except (SchemaError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
