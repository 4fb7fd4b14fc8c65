"""Formula/rule/ontology AST and the syntactic transformations over it."""
from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, NamedTuple, Optional, Set, Tuple, Union

from .terms import (URI, PlainLiteral, Term, TypedLiteral, Variable, XmlValue, is_var,
                    term_key)
from .vocab import DEFAULT_CONFIG, XML_LITERAL_IRI, VocabularyConfig, builtin_vocabulary, classify_xml_literal


class SignedTriple(NamedTuple):
    positive: bool
    predicate: Term
    subject: Term
    object: Term

    def negate(self) -> "SignedTriple":
        return SignedTriple(not self.positive, self.predicate, self.subject, self.object)

    @property
    def terms(self) -> Tuple[Term, Term, Term]:
        return (self.predicate, self.subject, self.object)


# --- formulas --------------------------------------------------------------

class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class Atom(Formula):
    predicate: Term
    subject: Term
    object: Term


@dataclass(frozen=True)
class StrongNeg(Formula):
    body: Formula


@dataclass(frozen=True)
class WeakNeg(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: Variable
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: Variable
    body: Formula


@dataclass(frozen=True)
class TrueConst(Formula):
    pass


@dataclass(frozen=True)
class FalseConst(Formula):
    pass


TRUE = TrueConst()
FALSE = FalseConst()

_BINARY = (And, Or, Implies)
_QUANT = (Exists, Forall)


def literal_formula(t: SignedTriple) -> Formula:
    a = Atom(t.predicate, t.subject, t.object)
    return a if t.positive else StrongNeg(a)


def conjoin(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def subformulas(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        if isinstance(g, _BINARY):
            stack.append(g.right)
            stack.append(g.left)
        elif isinstance(g, (StrongNeg, WeakNeg)):
            stack.append(g.body)
        elif isinstance(g, _QUANT):
            stack.append(g.body)


def atoms_of(f: Formula) -> List[Atom]:
    return [g for g in subformulas(f) if isinstance(g, Atom)]


def formula_terms(f: Formula) -> Set[Term]:
    """V_F: the URIs and literals occurring in ``f``."""
    out = set()
    for a in atoms_of(f):
        for t in (a.predicate, a.subject, a.object):
            if not is_var(t):
                out.add(t)
    return out


def variables(f: Formula) -> Set[Variable]:
    out = set()
    for g in subformulas(f):
        if isinstance(g, Atom):
            out.update(t for t in (g.predicate, g.subject, g.object) if is_var(t))
        elif isinstance(g, _QUANT):
            out.add(g.var)
    return out


def free_vars(f: Formula) -> Set[Variable]:
    if isinstance(f, Atom):
        return {t for t in (f.predicate, f.subject, f.object) if is_var(t)}
    if isinstance(f, (StrongNeg, WeakNeg)):
        return free_vars(f.body)
    if isinstance(f, _BINARY):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, _QUANT):
        return free_vars(f.body) - {f.var}
    return set()


def bound_vars(f: Formula) -> List[Variable]:
    """Quantified variables, one entry per binding occurrence."""
    return [g.var for g in subformulas(f) if isinstance(g, _QUANT)]


def variable_discipline_violation(f: Formula) -> Optional[str]:
    """Check that no variable is both free and bound, or bound twice."""
    bound = bound_vars(f)
    seen = set()
    for v in bound:
        if v in seen:
            return f"variable ?{v.name} is bound more than once"
        seen.add(v)
    both = free_vars(f) & seen
    if both:
        v = min(both)
        return f"variable ?{v.name} occurs both free and bound"
    return None


def substitute(f: Formula, mapping: Dict[Variable, Term]) -> Formula:
    """Replace free occurrences of variables according to ``mapping``."""
    if not mapping:
        return f
    if isinstance(f, Atom):
        return Atom(*(mapping.get(t, t) if is_var(t) else t
                      for t in (f.predicate, f.subject, f.object)))
    if isinstance(f, StrongNeg):
        return StrongNeg(substitute(f.body, mapping))
    if isinstance(f, WeakNeg):
        return WeakNeg(substitute(f.body, mapping))
    if isinstance(f, _BINARY):
        return type(f)(substitute(f.left, mapping), substitute(f.right, mapping))
    if isinstance(f, _QUANT):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        return type(f)(f.var, substitute(f.body, inner))
    return f


def substitute_triple(t: SignedTriple, mapping: Dict[Variable, Term]) -> SignedTriple:
    return SignedTriple(t.positive, *(mapping.get(x, x) if is_var(x) else x for x in t.terms))


# --- rules, graphs, ontologies ----------------------------------------------

Conclusion = Union[SignedTriple, FalseConst]


@dataclass(frozen=True)
class Rule:
    conclusion: Conclusion
    condition: Formula = TRUE

    @property
    def is_constraint(self) -> bool:
        return isinstance(self.conclusion, FalseConst)

    def conclusion_vars(self) -> Set[Variable]:
        if self.is_constraint:
            return set()
        return {t for t in self.conclusion.terms if is_var(t)}

    def free_vars(self) -> Set[Variable]:
        return free_vars(self.condition) | self.conclusion_vars()

    def variables(self) -> Set[Variable]:
        return variables(self.condition) | self.conclusion_vars()

    def terms(self) -> Set[Term]:
        out = formula_terms(self.condition)
        if not self.is_constraint:
            out.update(t for t in self.conclusion.terms if not is_var(t))
        return out

    def clash(self) -> Set[Variable]:
        """Bound variables of the condition that occur free in the conclusion."""
        return set(bound_vars(self.condition)) & self.conclusion_vars()


Graph = FrozenSet[SignedTriple]
Program = Tuple[Rule, ...]


@dataclass(frozen=True)
class Ontology:
    graph: Graph = frozenset()
    program: Program = ()
    prefixes: Dict[str, str] = field(default_factory=dict, compare=False, hash=False)

    def skolem_graph(self) -> Graph:
        return skolemize(self.graph)


def graph_terms(g: Iterable[SignedTriple]) -> Set[Term]:
    return {t for tr in g for t in tr.terms if not is_var(t)}


def graph_vars(g: Iterable[SignedTriple]) -> Set[Variable]:
    return {t for tr in g for t in tr.terms if is_var(t)}


def _triple_sort_key(t: SignedTriple):
    return (not t.positive,) + tuple(term_key(x) for x in t.terms)


def canonical_triples(g: Iterable[SignedTriple]) -> List[SignedTriple]:
    return sorted(g, key=_triple_sort_key)


def formula_of_graph(g: Iterable[SignedTriple]) -> Formula:
    """Existential closure of the conjunction of the graph's triples."""
    triples = canonical_triples(g)
    order: List[Variable] = []
    for t in triples:
        for x in (t.subject, t.object):
            if is_var(x) and x not in order:
                order.append(x)
    body = conjoin(literal_formula(t) for t in triples)
    for v in reversed(order):
        body = Exists(v, body)
    return body


SKOLEM_PREFIX = "urn:skolem:"


def graph_id_of(g: Iterable[SignedTriple]) -> str:
    text = "\n".join(repr(t) for t in canonical_triples(g))
    return hashlib.sha1(text.encode("utf-8")).hexdigest()[:12]


def skolem_uri(graph_id: str, var: Variable) -> URI:
    return URI(f"{SKOLEM_PREFIX}{graph_id}:{var.name}")


def skolemize(g: Iterable[SignedTriple], graph_id: Optional[str] = None) -> Graph:
    """Replace every blank-node variable by an artificial URI ``urn:skolem:<id>:<var>``."""
    g = frozenset(g)
    if not graph_vars(g):
        return g
    if graph_id is None:
        graph_id = graph_id_of(g)
    ns = f"{SKOLEM_PREFIX}{graph_id}:"
    for t in graph_terms(g):
        if isinstance(t, URI) and t.iri.startswith(ns):
            raise ValueError(f"graph id {graph_id!r} collides with URI {t.iri} already in the graph")
    mapping = {v: skolem_uri(graph_id, v) for v in graph_vars(g)}
    return frozenset(substitute_triple(t, mapping) for t in g)


def program_terms(p: Iterable[Rule]) -> Set[Term]:
    out = set()
    for r in p:
        out |= r.terms()
    return out


def vocabulary_of(o: Ontology, cfg: VocabularyConfig = DEFAULT_CONFIG) -> FrozenSet[Term]:
    """V_O: skolemized graph terms, program terms, and the built-in vocabulary."""
    return frozenset(graph_terms(o.skolem_graph()) | program_terms(o.program) | builtin_vocabulary(cfg))


def is_xml_literal(t) -> bool:
    return isinstance(t, TypedLiteral) and t.datatype == XML_LITERAL_IRI


def denote(t):
    """Herbrand denotation: well-typed XML literals map to their XML value."""
    if is_xml_literal(t):
        v = classify_xml_literal(t.lexical)
        if v is not None:
            return v
    return t


def herbrand_universe(o: Ontology, cfg: VocabularyConfig = DEFAULT_CONFIG) -> FrozenSet:
    return frozenset(denote(t) for t in vocabulary_of(o, cfg))


class LimitError(RuntimeError):
    """A configured search or grounding limit was exhausted."""

    resource = "limit"


class GroundingLimitError(LimitError):
    resource = "max_ground_rules"

    def __init__(self, rule: Optional[Rule], required: int, cap: int):
        super().__init__(f"grounding needs {required} rule instances (cap {cap})")
        self.rule = rule
        self.required = required
        self.cap = cap


def ground_rule(r: Rule, vocab: Iterable[Term]) -> Iterator[Rule]:
    fv = sorted(r.free_vars(), key=lambda v: v.name)
    terms = sorted(vocab, key=term_key)
    for combo in itertools.product(terms, repeat=len(fv)):
        m = dict(zip(fv, combo))
        concl = r.conclusion if r.is_constraint else substitute_triple(r.conclusion, m)
        yield Rule(concl, substitute(r.condition, m))


def ground_count(p: Iterable[Rule], n: int) -> int:
    return sum(n ** len(r.free_vars()) for r in p)


def ground_program(p: Iterable[Rule], vocab: Iterable[Term], cap: int = 500_000) -> Program:
    """[P]_V: every instantiation of each rule's free variables by vocabulary terms.

    Bound variables stay quantified. Raises GroundingLimitError when the
    total would exceed ``cap``.
    """
    vocab = list(vocab)
    p = list(p)
    total = 0
    for r in p:
        need = len(vocab) ** len(r.free_vars())
        total += need
        if total > cap:
            raise GroundingLimitError(r, total, cap)
    out: List[Rule] = []
    for r in p:
        out.extend(ground_rule(r, vocab))
    return tuple(out)


def normalize_negation(f: Formula) -> Formula:
    """Push strong negation down to atoms using the DeMorgan-style falsification rules."""
    if isinstance(f, StrongNeg):
        return _negate(f.body)
    if isinstance(f, WeakNeg):
        return WeakNeg(normalize_negation(f.body))
    if isinstance(f, _BINARY):
        return type(f)(normalize_negation(f.left), normalize_negation(f.right))
    if isinstance(f, _QUANT):
        return type(f)(f.var, normalize_negation(f.body))
    return f


def _negate(g: Formula) -> Formula:
    if isinstance(g, Atom):
        return StrongNeg(g)
    if isinstance(g, And):
        return Or(_negate(g.left), _negate(g.right))
    if isinstance(g, Or):
        return And(_negate(g.left), _negate(g.right))
    if isinstance(g, StrongNeg):
        return normalize_negation(g.body)
    if isinstance(g, WeakNeg):
        return normalize_negation(g.body)
    if isinstance(g, Exists):
        return Forall(g.var, _negate(g.body))
    if isinstance(g, Forall):
        return Exists(g.var, _negate(g.body))
    if isinstance(g, Implies):
        return And(normalize_negation(g.left), _negate(g.right))
    # ¬true / ¬false are not ERDF formulas; treat the constants as their own falsification
    return FALSE if isinstance(g, TrueConst) else TRUE
