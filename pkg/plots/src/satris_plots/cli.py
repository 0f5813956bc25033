"""CLI: plot --kind fig3|fig4|fig5 --in results.csv --out figure.png"""

from __future__ import annotations

import argparse
import sys

from .render import PlotSpec, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot", description="Render satris experiment CSVs as figures")
    parser.add_argument("--kind", required=True,
                        choices=["fig3", "fig4", "fig5"])
    parser.add_argument("--in", dest="input_csv", required=True,
                        help="experiment CSV produced by the satris CLI")
    parser.add_argument("--out", dest="output_path", required=True,
                        help="output image path (e.g. figure.png)")
    parser.add_argument("--title", default="")
    args = parser.parse_args(argv)

    spec = PlotSpec(input_csv=args.input_csv, figure_kind=args.kind,
                    output_path=args.output_path, title=args.title)
    result = render(spec)
    print(f"{args.kind}: {result.n_rows} rows, "
          f"{len(result.legend_labels)} series -> {result.output_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
