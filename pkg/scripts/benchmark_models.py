"""Time stable-model enumeration for every bundled ontology under both persistence modes.

Writes a small table to stdout; ontologies that hit the timeout are reported as such.
"""
import argparse
import time
from pathlib import Path

from erdf.stable import EXACT, THREE_VALUED, LimitError, SearchLimits, solve
from erdf.syntax import parse_ontology
from erdf.vocab import VocabularyConfig

ONTOLOGIES = Path(__file__).resolve().parent.parent / "ontologies"


def run(path, mode, timeout, profile):
    o = parse_ontology(path.read_text())
    t0 = time.perf_counter()
    try:
        rep = solve(o, SearchLimits(persistence_mode=mode, timeout=timeout), VocabularyConfig(profile=profile))
    except LimitError as e:
        return f"limit ({e.resource})", time.perf_counter() - t0
    if rep.incoherent is not None:
        return "incoherent", time.perf_counter() - t0
    return f"{len(rep.families)} families", time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--timeout", type=float, default=20.0)
    ap.add_argument("--profile", choices=["full", "compact"], default="full")
    args = ap.parse_args()
    print(f"{'ontology':<18}{'mode':<14}{'result':<22}seconds")
    for path in sorted(ONTOLOGIES.glob("*.erdf")):
        for mode in (THREE_VALUED, EXACT):
            result, secs = run(path, mode, args.timeout, args.profile)
            print(f"{path.stem:<18}{mode:<14}{result:<22}{secs:.2f}")


if __name__ == "__main__":
    main()
