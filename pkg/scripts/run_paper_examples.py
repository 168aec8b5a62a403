#!/usr/bin/env python3
"""Run the built-in worked-example scenarios and print their transcripts.

Equivalent to `refbound paper-examples GROUP`; defaults to every fixture.
"""

import argparse
import sys

from refbound.cli import main as cli_main
from refbound.fixtures import FIXTURE_GROUPS


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("group", nargs="?", default="all",
                        choices=sorted(FIXTURE_GROUPS))
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--budget", type=int, default=1)
    parser.add_argument("--json", default=None)
    args = parser.parse_args()
    argv = ["paper-examples", args.group,
            "--seed", str(args.seed), "--budget", str(args.budget)]
    if args.json:
        argv += ["--json", args.json]
    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
