"""One entry point per figure kind, plus a dispatcher."""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURE_IDS, FigureSpec, render
from .schemas import SchemaError


def _build(figure_id: str) -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog=f"psgzt-viz-{figure_id}")
    ap.add_argument("inputs", nargs="+", help="input CSV path(s)")
    ap.add_argument("--out", required=True, help="output image path")
    ap.add_argument("--title", default=None)
    ap.add_argument("--dpi", type=int, default=130)
    ap.add_argument("--timestamp", action="store_true")
    if figure_id == "phaseplane":
        ap.add_argument("--tau", type=float, default=None)
        ap.add_argument("--meta", default=None, help="run meta JSON holding tau")
    if figure_id == "comparison":
        ap.add_argument("--boundary", default=None, help="optional B-curve CSV overlay")
    return ap


def _run(figure_id: str, argv) -> int:
    args = _build(figure_id).parse_args(argv)
    style = {"dpi": args.dpi, "timestamp": args.timestamp}
    if args.title:
        style["title"] = args.title
    if figure_id == "phaseplane":
        style["tau"] = args.tau
        style["meta"] = args.meta
    if figure_id == "comparison" and args.boundary:
        style["boundary_csv"] = args.boundary
    try:
        summary = render(FigureSpec(figure_id, args.inputs, args.out, style))
    except (SchemaError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(f"wrote {summary['out']}")
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] not in FIGURE_IDS:
        print(f"usage: psgzt-viz {{{','.join(FIGURE_IDS)}}} INPUT... --out PATH",
              file=sys.stderr)
        return 2
    return _run(argv[0], argv[1:])


def main_regions(argv=None):
    return _run("regions", sys.argv[1:] if argv is None else argv)


def main_boundary(argv=None):
    return _run("boundary", sys.argv[1:] if argv is None else argv)


def main_staircase(argv=None):
    return _run("staircase", sys.argv[1:] if argv is None else argv)


def main_timeseries(argv=None):
    return _run("timeseries", sys.argv[1:] if argv is None else argv)


def main_phaseplane(argv=None):
    return _run("phaseplane", sys.argv[1:] if argv is None else argv)


def main_comparison(argv=None):
    return _run("comparison", sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
