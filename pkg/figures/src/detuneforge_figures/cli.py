"""Script entry point: render one figure from CSV artifacts.

Usage:
    detuneforge-fig fig1 --input sweep=out/sweep.csv --out fig1.png
    detuneforge-fig fig2 --input pa_errorless=a.csv --input sc_errorless=b.csv \
        --input pa_faulty=c.csv --input sc_faulty=d.csv \
        --input direct_faulty=e.csv --out fig2.svg
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import FIGURE_IDS, FigureSpec, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="detuneforge-fig", description=__doc__)
    parser.add_argument("figure_id", choices=FIGURE_IDS)
    parser.add_argument(
        "--input",
        action="append",
        default=[],
        metavar="ROLE=PATH",
        help="named input CSV; repeat for multiple roles",
    )
    parser.add_argument("--out", required=True, type=Path, help="output image (png or svg)")
    args = parser.parse_args(argv)

    inputs = {}
    for item in args.input:
        role, sep, path = item.partition("=")
        if not sep:
            parser.error(f"--input expects ROLE=PATH, got {item!r}")
        inputs[role] = Path(path)
    try:
        spec = FigureSpec(args.figure_id, inputs, args.out)
        out = render(spec)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
