"""Command-line interface: validate scenarios, run them, sweep design parameters.

Exit codes: 0 on success, 2 on scenario/input errors (one machine-parsable
`error: <kind>: <message>` line on stderr). `LCRIS_THREADS` caps the snapshot
worker count.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .materials import load_mixture_file
from .scenario import ScenarioError, parse_scenario
from .simulate import SWEEP_AXES, export, run, sweep, write_sweep_csv
from .unitcell import PhaseUnreachableError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lcris",
        description="Liquid-crystal RIS simulator: reflection patterns, transients, tradeoffs",
    )
    parser.add_argument("--version", action="version", version=f"lcris {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("scenario", help="scenario file (key = value text)")
    common.add_argument("--mixtures", action="append", default=[], metavar="FILE",
                        help="register a user mixture file before parsing (repeatable)")

    p_run = sub.add_parser("run", parents=[common],
                           help="simulate the scenario and export patterns + metrics")
    p_run.add_argument("--out", required=True, metavar="DIR", help="output directory")

    p_sweep = sub.add_parser("sweep", parents=[common],
                             help="tradeoff table along one design axis")
    p_sweep.add_argument("--axis", required=True, choices=SWEEP_AXES)
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated axis values (mixture names for --axis mixture)")
    p_sweep.add_argument("--out", required=True, metavar="DIR", help="output directory")

    sub.add_parser("validate", parents=[common], help="parse and validate only")
    return parser


def _fail(kind: str, message: str) -> int:
    print(f"error: {kind}: {message}", file=sys.stderr)
    return 2


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        for mixture_file in args.mixtures:
            load_mixture_file(mixture_file)
        scenario = parse_scenario(args.scenario)
    except ScenarioError as exc:
        return _fail("scenario", str(exc))
    except (OSError, ValueError) as exc:
        return _fail("input", str(exc))

    if args.command == "validate":
        print(f"ok: {args.scenario}")
        return 0

    try:
        if args.command == "run":
            result = run(scenario)
            written = export(result, args.out, scenario_path=args.scenario)
            for report in result.feasibility:
                if not report.feasible:
                    print(f"warning: profile clipped ({report.clipped_fraction:.1%} of "
                          f"elements) — tuning range {report.available_phase:.3f} rad")
            print(f"wrote {len(written)} files to {args.out}")
            return 0
        # sweep
        values = [item.strip() for item in args.values.split(",") if item.strip()]
        if not values:
            return _fail("input", "no sweep values given")
        if args.axis != "mixture":
            values = [float(item) for item in values]
        rows = sweep(scenario, args.axis, values)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        out_path = out_dir / f"sweep_{args.axis}.csv"
        write_sweep_csv(rows, out_path)
        print(f"wrote {out_path}")
        return 0
    except PhaseUnreachableError as exc:
        return _fail("infeasible", str(exc))
    except (OSError, ValueError) as exc:
        return _fail("run", str(exc))


if __name__ == "__main__":
    sys.exit(main())
