"""Command line front end.

Four subcommands share one flag set (--system, --seed, --budget,
--depth-cap, --json):

    refbound run PATH              execute a scenario file
    refbound fixture NAME [--run]  print (or run) a built-in scenario
    refbound suite NAME|all        run property suites directly
    refbound paper-examples GROUP  run a fixture group

Exit codes: 0 all assertions held, 1 an assertion or suite failed,
2 malformed input (reported with line and column for scenario files).
"""

from __future__ import annotations

import argparse
import json
import sys as _sys

from .oracle import SUITE_NAMES, run_suite
from .scenario import ScenarioError, ScenarioOutcome, run_scenario, run_scenario_text
from .fixtures import FIXTURE_GROUPS, FIXTURE_NAMES, emit_fixture, fixture_group

__all__ = ["main", "run_scenario", "emit_fixture"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="refbound",
        description="Exact boundary functions for ideal sets of refinement "
                    "limit systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--system", metavar="LITERAL", default=None,
                       help="system literal, e.g. ';2' or '2;3,2'")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--budget", type=int, default=1,
                       help="sampling multiplier for suites")
        p.add_argument("--depth-cap", type=int, default=None, dest="depth_cap",
                       help="search depth cap for membership verdicts")
        p.add_argument("--json", metavar="PATH", default=None, dest="json_path",
                       help="also write machine-readable results to PATH")

    p_run = sub.add_parser("run", help="execute a scenario file")
    p_run.add_argument("path")
    common(p_run)

    p_fix = sub.add_parser("fixture", help="print or run a built-in scenario")
    p_fix.add_argument("name", choices=list(FIXTURE_NAMES))
    p_fix.add_argument("--run", action="store_true",
                       help="execute the fixture instead of printing it")
    common(p_fix)

    p_suite = sub.add_parser("suite", help="run property suites")
    p_suite.add_argument("name", choices=list(SUITE_NAMES) + ["all"])
    common(p_suite)

    p_pe = sub.add_parser("paper-examples", help="run a fixture group")
    p_pe.add_argument("group", choices=sorted(FIXTURE_GROUPS))
    common(p_pe)
    return parser


def _print_outcome(out: ScenarioOutcome) -> None:
    for r in out.results:
        mark = "ok  " if r.status == "ok" else "FAIL"
        tail = f"  [{r.detail}]" if r.detail else ""
        print(f"{mark}  line {r.line:>3}: {r.text}{tail}")
    bad = sum(1 for r in out.results if r.status == "fail")
    print(f"{len(out.results)} commands, {bad} failed")


def _write_json(path, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
        if not text.endswith("\n"):
            fh.write("\n")


def _scenario_command(outcome: ScenarioOutcome, json_path) -> int:
    _print_outcome(outcome)
    if json_path:
        _write_json(json_path, outcome.to_json())
    return outcome.exit_code


def _cmd_run(args) -> int:
    try:
        outcome = run_scenario(args.path, system=args.system, seed=args.seed,
                               budget=args.budget, depth_cap=args.depth_cap)
    except OSError as err:
        print(f"error: {err}", file=_sys.stderr)
        return 2
    return _scenario_command(outcome, args.json_path)


def _cmd_fixture(args) -> int:
    text = emit_fixture(args.name)
    if not args.run:
        print(text, end="" if text.endswith("\n") else "\n")
        return 0
    outcome = run_scenario_text(text, system=args.system, seed=args.seed,
                                budget=args.budget, depth_cap=args.depth_cap)
    return _scenario_command(outcome, args.json_path)


def _cmd_suite(args) -> int:
    names = list(SUITE_NAMES) if args.name == "all" else [args.name]
    reports = []
    for name in names:
        rep = run_suite(name, args.system, args.seed, args.budget)
        reports.append(rep)
        status = "ok  " if rep.ok else "FAIL"
        print(f"{status}  {rep.suite:<20} system={rep.system} "
              f"samples={rep.samples} violations={len(rep.violations)}")
        for v in rep.violations:
            print(f"      #{v.index}: {v.description}"
                  + (f"  [{v.witness}]" if v.witness else ""))
    bad = sum(1 for rep in reports if not rep.ok)
    print(f"{len(reports)} suites, {bad} failed")
    if args.json_path:
        payload = json.dumps(
            {"exit": 1 if bad else 0,
             "reports": [json.loads(rep.to_json()) for rep in reports]},
            sort_keys=True, indent=2)
        _write_json(args.json_path, payload)
    return 1 if bad else 0


def _cmd_paper_examples(args) -> int:
    names = fixture_group(args.group)
    merged = ScenarioOutcome()
    code = 0
    for name in names:
        print(f"--- {name} ---")
        outcome = run_scenario_text(
            emit_fixture(name), seed=args.seed, budget=args.budget,
            depth_cap=args.depth_cap)
        _print_outcome(outcome)
        merged.results.extend(outcome.results)
        merged.reports.extend(outcome.reports)
        code = max(code, outcome.exit_code)
    if args.json_path:
        _write_json(args.json_path, merged.to_json())
    return code


_COMMANDS = {
    "run": _cmd_run,
    "fixture": _cmd_fixture,
    "suite": _cmd_suite,
    "paper-examples": _cmd_paper_examples,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ScenarioError as err:
        print(f"error: {err}", file=_sys.stderr)
        return 2
    except ValueError as err:
        print(f"error: {err}", file=_sys.stderr)
        return 2
