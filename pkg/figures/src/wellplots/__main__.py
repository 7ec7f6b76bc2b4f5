"""Command line: render one figure from solver output files.

    python -m wellplots F2 --grid slice.csv --out fig2
    python -m wellplots F6 --grid slice.csv --roots roots_a.csv --roots roots_b.csv --out fig6
    python -m wellplots F7 --spectrum s1.json --spectrum s2.json --out fig7
    python -m wellplots F8 --shallow shallow.json --out fig8
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import FIGURE_IDS, FigureSpec, render
from .io import SchemaError


def _span(text: str) -> tuple[float, float]:
    lo, hi = text.split(":")
    return (float(lo), float(hi))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="wellplots", description=__doc__)
    parser.add_argument("figure", choices=FIGURE_IDS)
    parser.add_argument("--grid", action="append", default=[], help="grid CSV from nodal-grid")
    parser.add_argument("--roots", action="append", default=[], help="roots CSV from spectrum/classify")
    parser.add_argument("--spectrum", action="append", default=[], help="spectrum JSON")
    parser.add_argument("--shallow", action="append", default=[], help="shallow JSON")
    parser.add_argument("--xlim", type=_span, default=None)
    parser.add_argument("--ylim", type=_span, default=None)
    parser.add_argument("--clim", type=_span, default=None)
    parser.add_argument("--out", required=True, help="output base path (writes .png and .svg)")
    args = parser.parse_args(argv)

    spec = FigureSpec(
        figure_id=args.figure,
        inputs={
            "grid": [Path(p) for p in args.grid],
            "roots": [Path(p) for p in args.roots],
            "spectrum": [Path(p) for p in args.spectrum],
            "shallow": [Path(p) for p in args.shallow],
        },
        xlim=args.xlim,
        ylim=args.ylim,
        clim=args.clim,
        output=Path(args.out),
    )
    try:
        paths = render(spec)
    except (SchemaError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
