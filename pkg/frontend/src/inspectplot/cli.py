"""Command line for rendering telemetry CSV logs into figure files."""

from __future__ import annotations

import argparse
import sys

from inspectplot.figures import FIGURES, FORMATS, PlotJob, render
from inspectplot.telemetry import SchemaError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render",
        description="Render mission-telemetry CSV logs into figure files.",
    )
    parser.add_argument("--telemetry", required=True,
                        help="telemetry CSV produced by the simulator")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--figures", default=",".join(FIGURES),
                        help="comma-separated subset of: " + ", ".join(FIGURES))
    parser.add_argument("--format", default="png", choices=FORMATS,
                        dest="image_format", help="image file format")
    parser.add_argument("--scenario", default=None,
                        help="optional scenario TOML for obstacle wireframes")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    figures = tuple(f.strip() for f in args.figures.split(",") if f.strip())
    try:
        job = PlotJob(
            telemetry_path=args.telemetry,
            out_dir=args.out,
            figures=figures,
            image_format=args.image_format,
            scenario_path=args.scenario,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        results = render(job)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for name in figures:
        print(f"wrote {results[name].path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
