"""Command-line entry point.

Runs a scenario (built-in name or TOML file), writes per-step telemetry as
CSV, and optionally a JSON run summary. Exit codes: 0 mission complete and
safe, 1 incomplete at the duration limit, 2 safety violation in strict mode,
3 numerical failure, 4 configuration error.
"""

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import __version__
from .config import BUILTIN_SCENARIOS, ConfigError, load_builtin, load_config
from .simulate import EXIT_CONFIG_ERROR, run, write_telemetry


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="inspectsim",
        description="Deterministic spacecraft-inspection safety-control simulator.",
    )
    p.add_argument(
        "--config",
        default="intelsat30",
        help="builtin scenario name (%s) or path to a TOML scenario file"
        % ", ".join(BUILTIN_SCENARIOS),
    )
    p.add_argument("--out", type=Path, default=None,
                   help="telemetry CSV output path (default: <scenario>_telemetry.csv)")
    p.add_argument("--summary-json", type=Path, default=None,
                   help="write the run summary as JSON to this path")
    p.add_argument("--duration", type=float, default=None,
                   help="override the scenario maximum duration [s]")
    p.add_argument("--dt", type=float, default=None,
                   help="override the integration step [s]")
    p.add_argument("--strict", action="store_true",
                   help="abort with exit code 2 on any barrier violation")
    p.add_argument("--seed", type=int, default=None,
                   help="override the scenario seed (recorded in the summary; "
                        "the simulation itself is deterministic)")
    p.add_argument("--quiet", action="store_true", help="suppress the summary printout")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config in BUILTIN_SCENARIOS:
            config = load_builtin(args.config)
        else:
            config = load_config(args.config)
        overrides = {}
        if args.duration is not None:
            if args.duration <= 0:
                raise ConfigError("--duration must be positive")
            overrides["max_duration"] = args.duration
        if args.dt is not None:
            if args.dt <= 0:
                raise ConfigError("--dt must be positive")
            overrides["dt"] = args.dt
        if args.strict:
            overrides["strict"] = True
        if args.seed is not None:
            overrides["seed"] = args.seed
        if overrides:
            config = dataclasses.replace(config, **overrides)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    result = run(config)
    summary = result.summary

    out = args.out if args.out is not None else Path(f"{config.name or 'run'}_telemetry.csv")
    write_telemetry(result, out)
    if args.summary_json is not None:
        args.summary_json.write_text(
            json.dumps({"scenario": config.name, "seed": config.seed,
                        **summary.as_dict()}, indent=2) + "\n"
        )

    if not args.quiet:
        status = {0: "complete", 1: "incomplete", 2: "safety violation",
                  3: "numerical failure"}.get(summary.exit_status, "unknown")
        print(f"scenario:        {config.name}")
        print(f"status:          {status}")
        if summary.completion_time_s is not None:
            print(f"completed at:    {summary.completion_time_s:.1f} s")
        print(f"steps:           {summary.steps} (wall {summary.wall_time_s:.2f} s)")
        if summary.min_h_p is not None:
            print(f"min h_p:         {summary.min_h_p:.6f}")
        if summary.min_h_min is not None:
            print(f"min h_min:       {summary.min_h_min:.6f}")
        print(f"max |v|:         {summary.max_abs_v:.4f} m/s")
        print(f"max |omega|:     {summary.max_abs_omega:.6f} rad/s")
        print(f"violations:      {summary.violations}")
        print(f"telemetry:       {out}")
        if summary.message:
            print(f"note:            {summary.message}")
    return summary.exit_status


if __name__ == "__main__":
    raise SystemExit(main())
