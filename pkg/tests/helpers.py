"""Shared strategies and small oracles for the test suite."""
from pathlib import Path

from hypothesis import strategies as st

from erdf.interp import HerbrandInterpretation, _value, satisfies
from erdf.model import (And, Atom, Exists, Forall, Implies, Or, SignedTriple, StrongNeg, WeakNeg)
from erdf.syntax import parse_ontology
from erdf.terms import URI, Variable

ROOT = Path(__file__).resolve().parent.parent
ONTOLOGIES = ROOT / "ontologies"
EX = "http://example.org/"


def load(name: str, cfg=None):
    return parse_ontology((ONTOLOGIES / f"{name}.erdf").read_text(), cfg)


def ex(local: str) -> URI:
    return URI(EX + local)


A, B, C, P, Q = (ex(n) for n in "abcpq")
X, Y, Z = Variable("x"), Variable("y"), Variable("z")
UNIVERSE = frozenset({A, B, C, P, Q})
PREDS = [P, Q]
NODES = [A, B, C]
VARS = [X, Y, Z]

# --- interpretations ----------------------------------------------------------------

_pairs = [(p, s, o) for p in PREDS for s in NODES for o in NODES]


@st.composite
def interpretations(draw, coherent=True):
    """Partial interpretations over a five-element universe (no closure conditions)."""
    signs = draw(st.lists(st.sampled_from([None, True, False, "both"]),
                          min_size=len(_pairs), max_size=len(_pairs)))
    if coherent:
        signs = [None if s == "both" else s for s in signs]
    pt = frozenset(t for t, s in zip(_pairs, signs) if s in (True, "both"))
    pf = frozenset(t for t, s in zip(_pairs, signs) if s in (False, "both"))
    return HerbrandInterpretation(UNIVERSE, pt, pf)


node_or_var = st.sampled_from(NODES + VARS)


@st.composite
def signed_triples(draw, allow_vars=True):
    pool = NODES + VARS if allow_vars else NODES
    return SignedTriple(draw(st.booleans()), draw(st.sampled_from(PREDS)),
                        draw(st.sampled_from(pool)), draw(st.sampled_from(pool)))


def graphs(allow_vars=True):
    return st.frozensets(signed_triples(allow_vars), min_size=1, max_size=4)


# --- formulas -----------------------------------------------------------------------

atoms = st.builds(Atom, st.sampled_from(PREDS), node_or_var, node_or_var)


def _extend(children):
    return st.one_of(
        st.builds(StrongNeg, children),
        st.builds(WeakNeg, children),
        st.builds(And, children, children),
        st.builds(Or, children, children),
        st.builds(Implies, children, children),
        st.builds(Exists, st.sampled_from(VARS), children),
        st.builds(Forall, st.sampled_from(VARS), children),
    )


formulas = st.recursive(atoms, _extend, max_leaves=6)
valuations = st.fixed_dictionaries({v: st.sampled_from(sorted(UNIVERSE)) for v in VARS})


def lazy_sat(i: HerbrandInterpretation, v, f) -> bool:
    """Satisfaction that applies one falsification rewrite at a time.

    Shares only the base clauses with ``satisfies``; strong negation of a
    compound formula is rewritten a single step, then evaluated recursively.
    """
    if isinstance(f, StrongNeg) and not isinstance(f.body, Atom):
        g = f.body
        if isinstance(g, And):
            return lazy_sat(i, v, Or(StrongNeg(g.left), StrongNeg(g.right)))
        if isinstance(g, Or):
            return lazy_sat(i, v, And(StrongNeg(g.left), StrongNeg(g.right)))
        if isinstance(g, (StrongNeg, WeakNeg)):
            return lazy_sat(i, v, g.body)
        if isinstance(g, Exists):
            return lazy_sat(i, v, Forall(g.var, StrongNeg(g.body)))
        if isinstance(g, Forall):
            return lazy_sat(i, v, Exists(g.var, StrongNeg(g.body)))
        if isinstance(g, Implies):
            return lazy_sat(i, v, And(g.left, StrongNeg(g.right)))
        raise TypeError(g)
    if isinstance(f, WeakNeg):
        return not lazy_sat(i, v, f.body)
    if isinstance(f, And):
        return lazy_sat(i, v, f.left) and lazy_sat(i, v, f.right)
    if isinstance(f, Or):
        return lazy_sat(i, v, f.left) or lazy_sat(i, v, f.right)
    if isinstance(f, Implies):
        return (not lazy_sat(i, v, f.left)) or lazy_sat(i, v, f.right)
    if isinstance(f, Exists):
        return any(lazy_sat(i, {**v, f.var: x}, f.body) for x in i.universe)
    if isinstance(f, Forall):
        return all(lazy_sat(i, {**v, f.var: x}, f.body) for x in i.universe)
    return satisfies(i, v, f)  # atoms and strongly negated atoms
