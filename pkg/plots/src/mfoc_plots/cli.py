"""Command line entry: plot <kind> --in <csv...> --out <png>."""

import argparse
import sys

from .render import KINDS, PlotError, PlotJob, render


def build_parser():
    p = argparse.ArgumentParser(
        prog="plot",
        description="Render a figure from experiment CSV outputs.")
    p.add_argument("kind", choices=KINDS, help="figure kind")
    p.add_argument("--in", dest="inputs", nargs="+", required=True,
                   metavar="CSV", help="input CSV file(s)")
    p.add_argument("--out", required=True, metavar="PNG",
                   help="output image path")
    p.add_argument("--window", type=int, default=50,
                   help="moving-average length for cost curves (1 = raw)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = PlotJob(kind=args.kind, inputs=tuple(args.inputs),
                      out=args.out, window=args.window)
        render(job)
    except (PlotError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
