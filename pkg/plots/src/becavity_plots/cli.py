"""Command line for artifact rendering: render --figure fig3 --in DIR --out PATH."""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURES, FigureSpec, SchemaError, render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="render",
        description="Render becavity CSV/JSON artifacts into figures.",
    )
    parser.add_argument("--figure", required=True, choices=FIGURES)
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="directory holding the experiment artifacts")
    parser.add_argument("--out", required=True,
                        help="output image path (PNG and SVG are written)")
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec(figure=args.figure, in_dir=args.in_dir, out_path=args.out)
        info = render(spec)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in info["outputs"]:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
