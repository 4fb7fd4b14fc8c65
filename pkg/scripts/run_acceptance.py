"""Print the PASS/FAIL line of every acceptance criterion, or of the ones named on the command line.

    python3 scripts/run_acceptance.py          # all nine
    python3 scripts/run_acceptance.py 1 4 9
"""
import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

import test_acceptance  # noqa: E402


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("criteria", nargs="*", type=int, choices=sorted(test_acceptance.CRITERIA))
    args = ap.parse_args(argv)
    failed = 0
    for n in args.criteria or sorted(test_acceptance.CRITERIA):
        ok, line = test_acceptance.evaluate(n)
        print(line, flush=True)
        failed += not ok
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
