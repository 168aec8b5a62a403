#!/usr/bin/env python3
"""Run the property suites over a list of systems and summarize.

Example:
    python3 scripts/run_suites.py --systems ';2' ';2,3' --seed 7 --budget 3
"""

import argparse
import json
import sys
import time

from refbound.oracle import SUITE_NAMES, run_suite


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--systems", nargs="+", default=[";2", ";2,3"],
                        metavar="LITERAL")
    parser.add_argument("--suites", nargs="+", default=list(SUITE_NAMES),
                        choices=list(SUITE_NAMES), metavar="NAME")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--budget", type=int, default=1)
    parser.add_argument("--json", default=None)
    args = parser.parse_args()

    reports = []
    failures = 0
    start = time.perf_counter()
    for lit in args.systems:
        for name in args.suites:
            rep = run_suite(name, lit, seed=args.seed, budget=args.budget)
            reports.append(rep)
            status = "ok" if rep.ok else "FAIL"
            print(f"{status:<5} {name:<20} {lit:<8} "
                  f"samples={rep.samples:<6} violations={len(rep.violations)}")
            for v in rep.violations:
                print(f"      #{v.index}: {v.description}  [{v.witness}]")
            failures += 0 if rep.ok else 1
    elapsed = time.perf_counter() - start
    print(f"{len(reports)} runs, {failures} failing, {elapsed:.1f}s")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump([json.loads(rep.to_json()) for rep in reports], fh,
                      indent=2, sort_keys=True)
            fh.write("\n")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
