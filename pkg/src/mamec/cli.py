"""Command line entry point: ``mamec run <spec.ini>``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .experiment import ExperimentSpec, SpecError, parse_spec, run_to_files


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mamec",
        description="Relay-aided D2D MEC latency experiments with movable "
                    "antennas")
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run the trials described by a spec "
                                      "file and write CSV results")
    runp.add_argument("spec", help="experiment spec file (INI)")
    runp.add_argument("--seeds", help="comma-separated seed override")
    runp.add_argument("--out", help="output directory override")
    runp.add_argument("--max-outer", type=int,
                      help="cap on outer iterations per trial")
    runp.add_argument("--threads", type=int,
                      help="parallel trial workers (results stay in "
                           "deterministic order)")
    runp.add_argument("--scheme", help="comma-separated scheme filter")
    runp.add_argument("--allow-nonconverged", action="store_true",
                      help="exit 0 even if some trial did not converge")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command != "run":
        return 2
    try:
        spec = parse_spec(args.spec)
        if args.seeds:
            spec.seeds = [int(s) for s in args.seeds.split(",") if s.strip()]
        if args.out:
            spec.output_dir = args.out
        if args.max_outer:
            spec.max_outer = args.max_outer
        if args.threads:
            spec.threads = args.threads
        if args.scheme:
            schemes = [s.strip() for s in args.scheme.split(",") if s.strip()]
            unknown = [s for s in schemes if s not in spec.schemes
                       and s not in ("pdd", "fpa", "local", "full_offload")]
            if unknown:
                raise SpecError(f"unknown scheme(s) {unknown}")
            spec.schemes = schemes
    except SpecError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 2
    code = run_to_files(spec)
    if code == 3 and args.allow_nonconverged:
        return 0
    return code


if __name__ == "__main__":
    sys.exit(main())
