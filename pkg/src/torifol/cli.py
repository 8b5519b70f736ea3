"""Command-line interface: validate | check | resolve | mmp | cone.

Reports are canonical JSON (sorted keys, exact fractions as strings), so
identical inputs produce byte-identical output.  Exit status: 0 on success,
1 when an asserted predicate is false, 2 on any error.
"""

from __future__ import annotations

import argparse
import sys

from .classify import (
    is_canonical,
    is_f_dlt,
    is_log_canonical,
    is_non_dicritical,
    is_tangent,
    is_terminal_at,
    singular_locus,
)
from .errors import NonSimplicialFan, NonZeroDelta, TorifolError
from .mmp import cone_certificate, run_mmp
from .problemio import (
    dumps,
    fan_to_json,
    load_problem,
    morphism_to_json,
    pair_to_json,
    trace_to_json,
    verdict_to_json,
)
from .resolve import (
    dagger_resolution,
    fdlt_modification,
    foliated_log_resolution,
    simplicialize_same_rays,
    smooth_refinement,
)

PREDICATES = ("non_dicritical", "lc", "canonical", "f_dlt")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="torifol",
        description="Exact singularity analysis and MMP for toric foliated pairs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and validate a problem file")
    p.add_argument("problem")
    p.add_argument("--out")

    p = sub.add_parser("check", help="run every singularity classifier")
    p.add_argument("problem")
    p.add_argument("--assert", dest="assert_pred", choices=PREDICATES)
    p.add_argument("--out")

    p = sub.add_parser("resolve", help="run a resolution pipeline")
    p.add_argument("problem")
    p.add_argument("--mode", required=True,
                   choices=("dagger", "smooth", "log", "fdlt"))
    p.add_argument("--out")

    p = sub.add_parser("mmp", help="minimal model program")
    p.add_argument("action", choices=("run",))
    p.add_argument("problem")
    p.add_argument("--max-steps", type=int, default=10_000)
    p.add_argument("--out")

    p = sub.add_parser("cone", help="cone-theorem certificates")
    p.add_argument("problem")
    p.add_argument("--out")
    return parser


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def check_report(pair):
    fan = pair.fan
    report = {"format": 1}
    report["non_dicritical"] = verdict_to_json(is_non_dicritical(fan, pair.W))
    report["lc"] = verdict_to_json(is_log_canonical(pair))
    try:
        report["canonical"] = verdict_to_json(is_canonical(pair))
    except NonZeroDelta:
        report["canonical"] = {"value": None, "reason": "boundary is nonzero"}
    terminal = {}
    for i, cone in enumerate(fan.max_cones):
        try:
            terminal[str(i)] = verdict_to_json(is_terminal_at(pair, cone))
        except NonZeroDelta:
            terminal[str(i)] = {"value": None, "reason": "boundary is nonzero"}
    report["terminal_at"] = terminal
    try:
        report["f_dlt"] = verdict_to_json(is_f_dlt(pair))
    except TorifolError as exc:
        report["f_dlt"] = {"value": None, "reason": str(exc)}
    try:
        report["singular_locus"] = [list(c) for c in singular_locus(fan, pair.W)]
    except NonSimplicialFan:
        report["singular_locus"] = None
    report["tangency"] = {
        ",".join(map(str, cone)): is_tangent(fan, pair.W, cone)
        for cone in fan.cones
    }
    return report


def execute_command(argv):
    """Dispatch a parsed command line; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        pair = load_problem(args.problem)
    except TorifolError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2

    try:
        if args.command == "validate":
            fan = pair.fan
            report = {
                "format": 1,
                "valid": True,
                "fan": fan_to_json(fan),
                "predicates": {
                    "simplicial": fan.is_simplicial,
                    "smooth": fan.is_smooth,
                    "complete": fan.is_complete,
                },
                "pair": pair_to_json(pair),
            }
            _emit(dumps(report), args.out)
            return 0

        if args.command == "check":
            report = check_report(pair)
            _emit(dumps(report), args.out)
            if args.assert_pred:
                value = report[args.assert_pred]["value"]
                return 0 if value else 1
            return 0

        if args.command == "resolve":
            if args.mode == "dagger":
                morphism = dagger_resolution(pair.fan, pair.W)
                report = {"format": 1, "mode": "dagger",
                          "morphism": morphism_to_json(morphism)}
            elif args.mode == "smooth":
                morphism = smooth_refinement(simplicialize_same_rays(pair.fan).source)
                report = {"format": 1, "mode": "smooth",
                          "morphism": morphism_to_json(morphism)}
            elif args.mode == "log":
                morphism, resolved = foliated_log_resolution(pair)
                report = {
                    "format": 1,
                    "mode": "log",
                    "morphism": morphism_to_json(morphism),
                    "pair": pair_to_json(resolved),
                }
            else:
                morphism, modified, extraction = fdlt_modification(pair)
                report = {
                    "format": 1,
                    "mode": "fdlt",
                    "morphism": morphism_to_json(morphism),
                    "pair": pair_to_json(modified),
                    "extraction": [
                        {"ray": list(ray), "phi": str(phi)}
                        for ray, phi in extraction
                    ],
                }
            _emit(dumps(report), args.out)
            return 0

        if args.command == "mmp":
            trace = run_mmp(pair, max_steps=args.max_steps)
            _emit(dumps(trace_to_json(trace)), args.out)
            return 0

        if args.command == "cone":
            certificates = cone_certificate(pair)
            report = {"format": 1, "certificates": certificates}
            _emit(dumps(report), args.out)
            return 0
    except TorifolError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    return 2


def main():
    raise SystemExit(execute_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
