"""Command line entry point: ``lorentzhol compute | preset list | verify``."""
from __future__ import annotations

import argparse
import os
import sys

from .errors import HolonomyError
from .presets import PRESETS, preset_names
from .scenario import (TOL_ENV, emit_report, exit_code, load_scenario, preset_scenario, run_scenario)
from .verify import run_verify, summary_lines


def _add_output_flags(p):
    p.add_argument("--out", help="write the report to this path instead of stdout")
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.add_argument("--tol", type=float, help=f"ODE tolerance (default from ${TOL_ENV} or 1e-10)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lorentzhol", description="Holonomy computations for Lorentzian manifolds.")
    sub = parser.add_subparsers(dest="command", required=True)
    compute = sub.add_parser("compute", help="run a scenario file or a named preset")
    src = compute.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenario", help="path to a YAML scenario file")
    src.add_argument("--preset", help="name of a built-in preset")
    _add_output_flags(compute)
    preset = sub.add_parser("preset", help="inspect the preset catalog")
    preset.add_argument("action", choices=("list",))
    verify = sub.add_parser("verify", help="run the acceptance suite")
    _add_output_flags(verify)
    return parser


def _write(text: str, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "preset":
        for name in preset_names():
            print(f"{name:34s} {PRESETS[name][0]}")
        return 0
    if args.tol is not None:
        os.environ[TOL_ENV] = repr(args.tol)
    try:
        if args.command == "verify":
            report = run_verify(float(os.environ.get(TOL_ENV, "1e-10")))
            for line in summary_lines(report):
                print(line, file=sys.stderr)
            if args.out:
                emit_report(report, args.format, args.out)
            else:
                _write(emit_report(report, args.format), None)
            return 0 if report["status"] == "certified" else 2
        scenario = load_scenario(args.scenario) if args.scenario else preset_scenario(args.preset)
        report = run_scenario(scenario)
        out = args.out or scenario.output
        if out:
            emit_report(report, args.format, out)
        else:
            _write(emit_report(report, args.format), None)
        return exit_code(report)
    except (HolonomyError, KeyError, ValueError) as exc:
        print(f"lorentzhol: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
