"""render: turn one diagnostic CSV into one figure."""

import argparse
import sys

from .render import FIGURE_KINDS, FigureSpec, SchemaError, render


def build_parser():
    p = argparse.ArgumentParser(prog="render", description=__doc__)
    p.add_argument("--kind", required=True, choices=FIGURE_KINDS)
    p.add_argument("--in", dest="input", required=True, help="input CSV")
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument("--summary", help="companion summary CSV (bands, mean lines)")
    p.add_argument("--column", help="statistic column for sweep-style figures")
    p.add_argument("--degree-kind", dest="degree_kind",
                   help="degree flavor in distribution CSVs (degree/in/out)")
    p.add_argument("--observed", type=float, help="observed value overlay")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(kind=args.kind, input=args.input, output=args.out,
                      summary=args.summary, column=args.column,
                      degree_kind=args.degree_kind, observed=args.observed)
    try:
        out = render(spec)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
