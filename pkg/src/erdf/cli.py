"""Command-line front end: ``erdf models|query|check|ground FILE``.

Exit codes: 0 ok, 1 no stable model (``check`` only), 2 parse or input
error, 3 a search or grounding limit was hit.
Output is deterministic; wall-clock timings appear only with ``--timings``.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Dict, List, Optional

from .interp import base_engine, format_term, format_triple
from .model import (GroundingLimitError, LimitError, Ontology, canonical_triples, ground_count, ground_program,
                    vocabulary_of)
from .stable import SearchLimits, Solver, credulous_answers, solve, stable_answers
from .syntax import DEFAULT_NAMESPACE, ParseError, parse_formula, parse_ontology, serialize
from .terms import URI, triple_key
from .vocab import STANDARD_PREFIXES, Profile, VocabularyConfig

EXIT_OK, EXIT_NO_MODEL, EXIT_PARSE, EXIT_LIMIT = 0, 1, 2, 3
PRINT_THRESHOLD = 200  # ground rules listed individually up to this many


class _InputError(Exception):
    pass


def _config(args) -> VocabularyConfig:
    return VocabularyConfig(container_index_bound=args.container_bound, profile=args.profile)


def _limits(args) -> SearchLimits:
    return SearchLimits(max_ground_rules=args.max_ground_rules, timeout=args.timeout,
                        persistence_mode=args.persistence)


def _load(path: str, cfg: VocabularyConfig) -> Ontology:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise _InputError(f"{path}: {e.strerror}") from e
    try:
        return parse_ontology(text, cfg)
    except ParseError as e:
        raise _InputError(f"{path}:{e}") from e


def _prefixes(o: Ontology) -> Dict[str, str]:
    return {**STANDARD_PREFIXES, **o.prefixes}


def _json_term(t) -> str:
    return t.iri if isinstance(t, URI) else format_term(t)


def _json_triples(ts) -> List[List[str]]:
    return [[_json_term(x) for x in t] for t in sorted(ts, key=triple_key)]


def _emit_json(obj):
    print(json.dumps(obj, indent=2, sort_keys=True))


# --- models / check ----------------------------------------------------------------

def _model_reports(o: Ontology, rep, cfg: VocabularyConfig):
    axioms = base_engine(o, cfg).freeze()
    out = []
    for fam in rep.families:
        out.append({"pt": sorted(fam.core.truths - axioms.truths, key=triple_key),
                    "pf": sorted(fam.core.falsities - axioms.falsities, key=triple_key),
                    "undecided": sorted(fam.undecided, key=triple_key),
                    "approximate": fam.approximate})
    return out


def cmd_models(args) -> int:
    cfg = _config(args)
    o = _load(args.file, cfg)
    rep = solve(o, _limits(args), cfg)
    stats = dict(rep.stats)
    stats["vocabulary"] = len(vocabulary_of(o, cfg))
    stats["families"] = len(rep.families)
    if not args.timings:
        stats.pop("seconds", None)
    models = _model_reports(o, rep, cfg)
    if args.json:
        _emit_json({
            "models": [{"pt": _json_triples(m["pt"]), "pf": _json_triples(m["pf"]),
                        "undecided": _json_triples(m["undecided"])} for m in models],
            "stats": stats,
            "approximate": rep.approximate,
            "incoherent": None if rep.incoherent is None else _json_triples([rep.incoherent.witness])[0],
        })
        return EXIT_OK
    px = _prefixes(o)
    print("# " + ", ".join(f"{k} {v}" for k, v in sorted(stats.items())))
    if rep.incoherent is not None:
        print(rep.incoherent.describe(px))
        print("0 stable models")
        return EXIT_OK
    for k, m in enumerate(models, 1):
        und = len(m["undecided"])
        head = f"model {k}" if not und else f"model family {k} ({2 ** und} members)"
        print(f"{head}: {len(m['pt'])} PT, {len(m['pf'])} PF beyond the axioms"
              + (f", {und} undecided" if und else "") + (" [approximate]" if m["approximate"] else ""))
        for t in m["pt"]:
            print(f"  PT {format_triple(t, px)}")
        for t in m["pf"]:
            print(f"  PF {format_triple(t, px)}")
        for t in m["undecided"]:
            print(f"  ?? {format_triple(t, px)}")
    if not models:
        print("no stable model")
    else:
        print(f"{len(models)} stable model{'s' if len(models) != 1 else ''}"
              + (" (families)" if any(m["undecided"] for m in models) else ""))
    if rep.approximate:
        print("warning: three-valued persistence check was inconclusive somewhere; result is approximate")
    return EXIT_OK


def cmd_check(args) -> int:
    cfg = _config(args)
    o = _load(args.file, cfg)
    s = Solver(o, cfg, _limits(args))
    if s.incoherent is not None:
        print(s.incoherent.describe(_prefixes(o)))
        return EXIT_NO_MODEL
    first = next(s.search(), None)
    if first is None:
        print("no stable model")
        return EXIT_NO_MODEL
    print("consistent: at least one stable model")
    return EXIT_OK


# --- query --------------------------------------------------------------------------

def _format_binding(d: Dict, px) -> str:
    return ", ".join(f"?{k} = {format_term(v, px)}" for k, v in sorted(d.items()))


def cmd_query(args) -> int:
    cfg = _config(args)
    o = _load(args.file, cfg)
    try:
        f = parse_formula(args.formula, {"": DEFAULT_NAMESPACE, **o.prefixes})
    except ParseError as e:
        raise _InputError(f"formula:{e}") from e
    px = _prefixes(o)
    limits = _limits(args)
    if args.mode == "skeptical":
        ans = stable_answers(o, f, limits, cfg)
        sets = [ans]
    else:
        ans = credulous_answers(o, f, limits, cfg)
        sets = [ans] if not isinstance(ans, list) else ans
    closed = not sets or sets[0].kind in ("yes", "no")
    if args.json:
        if closed:
            payload = {"answer": sets[0].kind if sets else "no"}
        else:
            payload = {"answers": [[{k: _json_term(v) for k, v in d.items()} for d in a.as_dicts()]
                                   for a in sets]}
        _emit_json({"query": serialize(f, px), "mode": args.mode, **payload})
        return EXIT_OK
    if closed:
        print(sets[0].kind if sets else "no")
        return EXIT_OK
    if args.mode == "skeptical":
        rows = sets[0].as_dicts()
        for d in rows:
            print(_format_binding(d, px))
        if not rows:
            print("no answers")
        return EXIT_OK
    for k, a in enumerate(sets, 1):
        print(f"answer set {k}:")
        for d in a.as_dicts():
            print("  " + _format_binding(d, px))
    if not sets:
        print("no answers")
    return EXIT_OK


# --- ground -------------------------------------------------------------------------

def cmd_ground(args) -> int:
    cfg = _config(args)
    o = _load(args.file, cfg)
    px = _prefixes(o)
    vocab = vocabulary_of(o, cfg)
    n = ground_count(o.program, len(vocab))
    print("sk(G):")
    for t in canonical_triples(o.skolem_graph()):
        print("  " + serialize(t, px))
    print(f"|V_O| = {len(vocab)}")
    print(f"ground rules: {n}")
    if n > args.max_ground_rules:
        raise GroundingLimitError(None, n, args.max_ground_rules)
    if n <= PRINT_THRESHOLD:
        for r in ground_program(o.program, vocab, args.max_ground_rules):
            print("  " + serialize(r, px))
    else:
        print(f"  (more than {PRINT_THRESHOLD}; not listed)")
    return EXIT_OK


# --- entry point --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help=".erdf ontology file")
    common.add_argument("--profile", choices=[p.value for p in Profile],
                        default=os.environ.get("ERDF_PROFILE", "full"))
    common.add_argument("--container-bound", type=int, default=1,
                        help="number of rdf:_i container properties to materialize")
    common.add_argument("--persistence", choices=["three-valued", "exact"], default="three-valued")
    common.add_argument("--max-ground-rules", type=int, default=500_000)
    common.add_argument("--timeout", type=float, default=60.0, help="seconds")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--timings", action="store_true", help="include wall-clock time in the stats")

    ap = argparse.ArgumentParser(prog="erdf", description="Stable-model reasoning over ERDF ontologies.")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("models", parents=[common], help="enumerate stable models")
    q = sub.add_parser("query", parents=[common], help="answer a query formula")
    q.add_argument("--formula", "-f", required=True)
    q.add_argument("--mode", choices=["skeptical", "credulous"], default="skeptical")
    sub.add_parser("check", parents=[common], help="exit 0 iff a stable model exists")
    sub.add_parser("ground", parents=[common], help="print sk(G) and the grounded program")
    return ap


COMMANDS = {"models": cmd_models, "query": cmd_query, "check": cmd_check, "ground": cmd_ground}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.profile not in [p.value for p in Profile]:  # only reachable via ERDF_PROFILE
        print(f"error: bad ERDF_PROFILE {args.profile!r}", file=sys.stderr)
        return EXIT_PARSE
    try:
        return COMMANDS[args.command](args)
    except _InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as e:  # bad limit or config values
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except LimitError as e:
        print(f"limit exceeded ({e.resource}): {e}", file=sys.stderr)
        return EXIT_LIMIT


if __name__ == "__main__":
    sys.exit(main())
