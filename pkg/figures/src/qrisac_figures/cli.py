"""Command line: render one or all figures from an experiment output directory."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import FIGURES, FigureSpec, NoDataError, SchemaError, render

__all__ = ["main"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qrisac-figures",
        description="Render comparison figures from qrisac experiment CSVs",
    )
    parser.add_argument("figure", choices=sorted(FIGURES) + ["all"], help="figure id to render")
    parser.add_argument("--input-dir", type=Path, required=True,
                        help="directory holding the CSVs and manifest.json")
    parser.add_argument("--output-dir", type=Path, required=True, help="directory for images")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    ids = sorted(FIGURES) if args.figure == "all" else [args.figure]
    status = 0
    for figure_id in ids:
        spec = FigureSpec(
            figure_id=figure_id,
            input_csv=args.input_dir / f"{FIGURES[figure_id]}.csv",
            output_path=args.output_dir / f"{figure_id}.png",
            manifest_path=args.input_dir / "manifest.json",
        )
        try:
            path = render(spec)
            print(f"{figure_id}: wrote {path}")
        except SchemaError as exc:
            print(f"{figure_id}: schema error: {exc}", file=sys.stderr)
            status = 2
        except NoDataError as exc:
            print(f"{figure_id}: no data: {exc}", file=sys.stderr)
            status = 3
    return status


if __name__ == "__main__":
    raise SystemExit(main())
