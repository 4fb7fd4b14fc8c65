"""Herbrand interpretations, satisfaction, condition checking and the closure engine."""
from __future__ import annotations

import itertools
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import (Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Set, Tuple,
                    Union)

from .model import (And, Atom, Exists, FalseConst, Forall, Formula, Implies, Ontology, Or, Rule,
                    SignedTriple, StrongNeg, TrueConst, WeakNeg, denote, formula_terms, free_vars,
                    graph_vars, herbrand_universe, is_xml_literal, normalize_negation, substitute)
from .terms import URI, PlainLiteral, TypedLiteral, Variable, XmlValue, is_var, term_key, triple_key
from .vocab import (CLASS, CMP, DATATYPE, DEFAULT_CONFIG, DOMAIN, LITERAL, MEMBER, PROPERTY, RANGE,
                    RESOURCE, ERDF_NS, SUBCLASS, SUBPROPERTY, TOTAL_CLASS, TOTAL_PROPERTY, TYPE, XML_LITERAL,
                    VocabularyConfig, axiomatic_triples, builtin_vocabulary)

Triple = Tuple  # (p, s, o) over resources
Valuation = Mapping[Variable, object]


def _triple(t) -> Tuple[bool, Triple]:
    """Accept a SignedTriple, (positive, p, s, o) or (positive, (p, s, o)); denote its terms."""
    if len(t) == 2:
        pos, (p, s, o) = t
    else:
        pos, p, s, o = t
    return bool(pos), (denote(p), denote(s), denote(o))


def signed_key(a) -> tuple:
    return (not a[0],) + triple_key(a[1:])


@dataclass(frozen=True)
class Incoherent:
    """Closure result when some triple ends up both true and false."""

    witness: Triple

    def __bool__(self):
        return False

    def describe(self, prefixes=None) -> str:
        t = format_triple(self.witness, prefixes)
        return f"graph incoherent: witness -{t} clashes with {t}"


class Closure:
    """Semi-naive forward chaining over the truth and falsity closure rules.

    Mutable and incremental: ``add`` queues facts and runs the agenda to a
    fixpoint. Totality is recorded (``total_properties``/``total_classes``)
    but not enforced. ``copy`` gives an independent engine for branching.
    """

    def __init__(self, universe: Iterable = (), stop_on_clash: bool = False):
        self.universe: Set = set()
        self.truths: Set[Triple] = set()
        self.falsities: Set[Triple] = set()
        self.pt: Dict = defaultdict(set)     # p -> {(s, o)}
        self.pf: Dict = defaultdict(set)
        self.ct: Dict = defaultdict(set)     # class -> {x}
        self.cf: Dict = defaultdict(set)
        self.sup_c: Dict = defaultdict(set)
        self.sub_c: Dict = defaultdict(set)
        self.sup_p: Dict = defaultdict(set)
        self.sub_p: Dict = defaultdict(set)
        self.dom: Dict = defaultdict(set)
        self.rng: Dict = defaultdict(set)
        self.clashes: Set[Triple] = set()
        self.stop_on_clash = stop_on_clash
        self._agenda: deque = deque()
        self.add_terms(universe)

    def copy(self) -> "Closure":
        c = Closure.__new__(Closure)
        c.universe = set(self.universe)
        c.truths = set(self.truths)
        c.falsities = set(self.falsities)
        for name in ("pt", "pf", "ct", "cf", "sup_c", "sub_c", "sup_p", "sub_p", "dom", "rng"):
            src = getattr(self, name)
            d = defaultdict(set)
            for k, v in src.items():
                d[k] = set(v)
            setattr(c, name, d)
        c.clashes = set(self.clashes)
        c.stop_on_clash = self.stop_on_clash
        c._agenda = deque(self._agenda)
        return c

    @property
    def coherent(self) -> bool:
        return not self.clashes

    @property
    def total_properties(self) -> Set:
        return self.ct.get(TOTAL_PROPERTY, set())

    @property
    def total_classes(self) -> Set:
        return self.ct.get(TOTAL_CLASS, set())

    def holds(self, positive: bool, t: Triple) -> bool:
        return t in (self.truths if positive else self.falsities)

    # --- insertion -----------------------------------------------------------

    def add_terms(self, terms: Iterable):
        self._seed(terms)
        self._run()

    def _seed(self, terms: Iterable):
        for x in terms:
            x = denote(x)
            if x in self.universe:
                continue
            self.universe.add(x)
            self._push(True, (TYPE, x, RESOURCE))
            if isinstance(x, PlainLiteral):
                self._push(True, (TYPE, x, LITERAL))
            elif isinstance(x, XmlValue):
                self._push(True, (TYPE, x, XML_LITERAL))
            elif is_xml_literal(x):
                # still a TypedLiteral after denote: ill-typed
                self._push(False, (TYPE, x, LITERAL))

    def add(self, facts: Iterable) -> bool:
        """Add signed facts and close. Returns coherence."""
        for f in facts:
            pos, t = _triple(f)
            self._note_terms(t)
            self._push(pos, t)
        self._run()
        return self.coherent

    def _note_terms(self, t: Triple):
        new = [x for x in t if x not in self.universe]
        if new:
            self._seed(new)

    def _push(self, pos: bool, t: Triple):
        if pos:
            if t in self.truths:
                return
            if t in self.falsities:
                self.clashes.add(t)
            self.truths.add(t)
        else:
            if t in self.falsities:
                return
            if t in self.truths:
                self.clashes.add(t)
            self.falsities.add(t)
        self._agenda.append((pos, t))

    def _run(self):
        agenda = self._agenda
        while agenda:
            if self.stop_on_clash and self.clashes:
                agenda.clear()
                return
            pos, t = agenda.popleft()
            self._note_terms(t)
            if pos:
                self._fire_true(t)
            else:
                self._fire_false(t)

    def _fire_true(self, t: Triple):
        p, s, o = t
        push = self._push
        self.pt[p].add((s, o))
        push(True, (TYPE, p, PROPERTY))
        for q in tuple(self.sup_p.get(p, ())):
            push(True, (q, s, o))
        for c in tuple(self.dom.get(p, ())):
            push(True, (TYPE, s, c))
        for c in tuple(self.rng.get(p, ())):
            push(True, (TYPE, o, c))
        if p == TYPE:
            self.ct[o].add(s)
            for b in tuple(self.sup_c.get(o, ())):
                push(True, (TYPE, s, b))
            if o == CLASS:
                push(True, (SUBCLASS, s, s))
                push(True, (SUBCLASS, s, RESOURCE))
            elif o == PROPERTY:
                push(True, (SUBPROPERTY, s, s))
            elif o == DATATYPE:
                push(True, (SUBCLASS, s, LITERAL))
            elif o == CMP:
                push(True, (SUBPROPERTY, s, MEMBER))
            elif o == TOTAL_PROPERTY:
                # TProp is a subset of Prop
                push(True, (TYPE, s, PROPERTY))
        elif p == SUBCLASS:
            self.sup_c[s].add(o)
            self.sub_c[o].add(s)
            push(True, (TYPE, s, CLASS))
            push(True, (TYPE, o, CLASS))
            for x in tuple(self.ct.get(s, ())):
                push(True, (TYPE, x, o))
            for x in tuple(self.cf.get(o, ())):
                push(False, (TYPE, x, s))
            for c in tuple(self.sup_c.get(o, ())):
                push(True, (SUBCLASS, s, c))
            for z in tuple(self.sub_c.get(s, ())):
                push(True, (SUBCLASS, z, o))
        elif p == SUBPROPERTY:
            self.sup_p[s].add(o)
            self.sub_p[o].add(s)
            push(True, (TYPE, s, PROPERTY))
            push(True, (TYPE, o, PROPERTY))
            for x, y in tuple(self.pt.get(s, ())):
                push(True, (o, x, y))
            for x, y in tuple(self.pf.get(o, ())):
                push(False, (s, x, y))
            for c in tuple(self.sup_p.get(o, ())):
                push(True, (SUBPROPERTY, s, c))
            for z in tuple(self.sub_p.get(s, ())):
                push(True, (SUBPROPERTY, z, o))
        elif p == DOMAIN:
            self.dom[s].add(o)
            for x, _ in tuple(self.pt.get(s, ())):
                push(True, (TYPE, x, o))
        elif p == RANGE:
            self.rng[s].add(o)
            for _, y in tuple(self.pt.get(s, ())):
                push(True, (TYPE, y, o))

    def _fire_false(self, t: Triple):
        p, s, o = t
        push = self._push
        self.pf[p].add((s, o))
        push(True, (TYPE, p, PROPERTY))
        for q in tuple(self.sub_p.get(p, ())):
            push(False, (q, s, o))
        if p == TYPE:
            self.cf[o].add(s)
            for a in tuple(self.sub_c.get(o, ())):
                push(False, (TYPE, s, a))

    def consequences(self, pos: bool, t: Triple) -> Optional[List[Tuple[bool, Triple]]]:
        """Immediate rule consequences of adding one fact, without adding it.

        Returns ``None`` for facts that change the schema itself (meta
        properties, or typing into a built-in meta class); their effect is
        not local.
        """
        p, s, o = t
        if p in _META_PROPERTIES or (p == TYPE and o in _META_CLASSES):
            return None
        out = [(True, (TYPE, p, PROPERTY))]
        if pos:
            out += [(True, (q, s, o)) for q in self.sup_p.get(p, ())]
            out += [(True, (TYPE, s, c)) for c in self.dom.get(p, ())]
            out += [(True, (TYPE, o, c)) for c in self.rng.get(p, ())]
            if p == TYPE:
                out += [(True, (TYPE, s, b)) for b in self.sup_c.get(o, ())]
        else:
            out += [(False, (q, s, o)) for q in self.sub_p.get(p, ())]
            if p == TYPE:
                out += [(False, (TYPE, s, a)) for a in self.sub_c.get(o, ())]
        return [c for c in out if c[1] != t or c[0] != pos]

    # --- export ----------------------------------------------------------------

    def first_clash(self) -> Optional[Triple]:
        return min(self.clashes, key=triple_key) if self.clashes else None

    def freeze(self) -> "HerbrandInterpretation":
        return HerbrandInterpretation(frozenset(self.universe), frozenset(self.truths),
                                      frozenset(self.falsities))


_META_PROPERTIES = frozenset({SUBCLASS, SUBPROPERTY, DOMAIN, RANGE})
_META_CLASSES = frozenset({CLASS, PROPERTY, DATATYPE, CMP, TOTAL_PROPERTY, TOTAL_CLASS})


def axiom_facts(cfg: VocabularyConfig = DEFAULT_CONFIG) -> List[SignedTriple]:
    return [SignedTriple(True, *t) for t in sorted(axiomatic_triples(cfg), key=triple_key)]


def _universe_for(o: Optional[Ontology], cfg: VocabularyConfig) -> List:
    if o is None:
        base = builtin_vocabulary(cfg)
    else:
        base = herbrand_universe(o, cfg)
    return sorted(base, key=term_key)


def base_engine(o: Optional[Ontology] = None, cfg: VocabularyConfig = DEFAULT_CONFIG,
                stop_on_clash: bool = False) -> Closure:
    """An engine holding the universe of ``o`` and the closed axiomatic triples."""
    eng = Closure(_universe_for(o, cfg), stop_on_clash=stop_on_clash)
    eng.add(axiom_facts(cfg))
    return eng


def add_staged(eng: Closure, facts: Iterable) -> Optional[Incoherent]:
    """Add facts so that the reported clash is deterministic.

    Truth rules never read falsities, so the positive facts close first;
    falsities then go in one at a time in canonical order and the first
    step that produces a clash supplies the witness: the falsity just added,
    which is the base fact contradicted by the truths.
    """
    if eng.clashes:
        return Incoherent(eng.first_clash())
    facts = sorted((_triple(f) for f in facts), key=lambda a: (not a[0],) + triple_key(a[1]))
    eng.add((True,) + t for pos, t in facts if pos)
    if eng.clashes:
        return Incoherent(eng.first_clash())
    for pos, t in facts:
        if not pos:
            eng.add([(False,) + t])
            if eng.clashes:
                return Incoherent(t)
    return None


def close(base: Iterable, o: Optional[Ontology] = None,
          cfg: VocabularyConfig = DEFAULT_CONFIG) -> Union["HerbrandInterpretation", Incoherent]:
    """Least interpretation containing ``base`` and the axioms, closed under the condition rules.

    ``base`` holds signed triples (SignedTriple or (positive, p, s, o)).
    The universe is Res_O^H when ``o`` is given, otherwise the built-in
    vocabulary plus the terms of ``base``.
    """
    eng = base_engine(o, cfg)
    clash = add_staged(eng, base)
    if clash is not None:
        return clash
    return eng.freeze()


# --- interpretations -----------------------------------------------------------

@dataclass(frozen=True)
class HerbrandInterpretation:
    universe: FrozenSet
    truths: FrozenSet[Triple]
    falsities: FrozenSet[Triple] = frozenset()

    @cached_property
    def _pt(self) -> Dict:
        d = defaultdict(set)
        for p, s, o in self.truths:
            d[p].add((s, o))
        return d

    @cached_property
    def _pf(self) -> Dict:
        d = defaultdict(set)
        for p, s, o in self.falsities:
            d[p].add((s, o))
        return d

    def pt(self, p) -> Set:
        return self._pt.get(p, set())

    def pf(self, p) -> Set:
        return self._pf.get(p, set())

    def ct(self, c) -> Set:
        return {s for s, o in self.pt(TYPE) if o == c}

    def cf(self, c) -> Set:
        return {s for s, o in self.pf(TYPE) if o == c}

    @cached_property
    def properties(self) -> FrozenSet:
        return frozenset(self.ct(PROPERTY))

    @cached_property
    def classes(self) -> FrozenSet:
        return frozenset(self.ct(CLASS))

    @cached_property
    def total_properties(self) -> FrozenSet:
        return frozenset(self.ct(TOTAL_PROPERTY))

    @cached_property
    def total_classes(self) -> FrozenSet:
        return frozenset(self.ct(TOTAL_CLASS))

    @cached_property
    def literal_values(self) -> FrozenSet:
        return frozenset(self.ct(LITERAL))

    @property
    def coherent(self) -> bool:
        return not (self.truths & self.falsities)

    def holds(self, positive: bool, t: Triple) -> bool:
        return t in (self.truths if positive else self.falsities)

    def dump(self, exclude: Optional["HerbrandInterpretation"] = None, prefixes=None) -> str:
        """``PT p(s,o)`` / ``PF p(s,o)`` lines in canonical order."""
        pt, pf = self.truths, self.falsities
        if exclude is not None:
            pt, pf = pt - exclude.truths, pf - exclude.falsities
        lines = [f"PT {format_triple(t, prefixes)}" for t in sorted(pt, key=triple_key)]
        lines += [f"PF {format_triple(t, prefixes)}" for t in sorted(pf, key=triple_key)]
        return "\n".join(lines)


def format_term(x, prefixes=None) -> str:
    from .syntax import _Writer

    if isinstance(x, XmlValue):
        return f"xml<{x.canonical}>"
    return _Writer(prefixes or {}).term(x)


def format_triple(t: Triple, prefixes=None) -> str:
    p, s, o = t
    return f"{format_term(p, prefixes)}({format_term(s, prefixes)}, {format_term(o, prefixes)})"


def leq(i: HerbrandInterpretation, j: HerbrandInterpretation) -> bool:
    if i.universe != j.universe:
        raise ValueError("interpretations have different universes")
    return i.truths <= j.truths and i.falsities <= j.falsities


# --- satisfaction --------------------------------------------------------------

def _value(x, v: Valuation):
    if is_var(x):
        if x not in v:
            raise ValueError(f"valuation is undefined on {x!r}")
        return v[x]
    return denote(x)


def _in_vocabulary(i: HerbrandInterpretation, f: Formula) -> bool:
    return all(denote(t) in i.universe for t in formula_terms(f))


def satisfies(i: HerbrandInterpretation, v: Valuation, f: Formula) -> bool:
    """I, v |= F, clause by clause."""
    if isinstance(f, Atom):
        t = (_value(f.predicate, v), _value(f.subject, v), _value(f.object, v))
        return t in i.truths
    if isinstance(f, StrongNeg):
        b = f.body
        if isinstance(b, Atom):
            t = (_value(b.predicate, v), _value(b.subject, v), _value(b.object, v))
            return t in i.falsities
        return satisfies(i, v, normalize_negation(f))
    if isinstance(f, WeakNeg):
        return _in_vocabulary(i, f.body) and not satisfies(i, v, f.body)
    if isinstance(f, And):
        return satisfies(i, v, f.left) and satisfies(i, v, f.right)
    if isinstance(f, Or):
        return satisfies(i, v, f.left) or satisfies(i, v, f.right)
    if isinstance(f, Implies):
        return satisfies(i, v, Or(WeakNeg(f.left), f.right))
    if isinstance(f, (Exists, Forall)):
        vals = ({**v, f.var: x} for x in i.universe)
        test = any if isinstance(f, Exists) else all
        return test(satisfies(i, u, f.body) for u in vals)
    if isinstance(f, TrueConst):
        return True
    if isinstance(f, FalseConst):
        return False
    raise TypeError(f"not a formula: {f!r}")


def valuations(vs: Iterable[Variable], universe: Iterable) -> Iterator[Dict]:
    vs = sorted(vs, key=lambda x: x.name)
    elems = sorted(universe, key=term_key)
    for combo in itertools.product(elems, repeat=len(vs)):
        yield dict(zip(vs, combo))


def satisfies_closed(i: HerbrandInterpretation, f: Formula) -> bool:
    """I |= F: every valuation of the free variables satisfies F."""
    return all(satisfies(i, v, f) for v in valuations(free_vars(f), i.universe))


def satisfies_graph(i: HerbrandInterpretation, g: Iterable[SignedTriple]) -> bool:
    """Some single valuation of the graph's variables makes every triple hold."""
    g = list(g)
    return _match(i, g, {}) is not None


def _match(i: HerbrandInterpretation, triples: List[SignedTriple], v: Dict) -> Optional[Dict]:
    if not triples:
        return v
    # most-bound triple first
    def unbound(t):
        return sum(1 for x in t.terms if is_var(x) and x not in v)
    k = min(range(len(triples)), key=lambda j: unbound(triples[j]))
    t = triples[k]
    rest = triples[:k] + triples[k + 1:]
    store = i._pt if t.positive else i._pf
    p = _value(t.predicate, v) if not is_var(t.predicate) or t.predicate in v else None
    preds = [p] if p is not None else list(store)
    for pred in preds:
        for s, o in store.get(pred, ()):
            u = dict(v)
            ok = True
            for term, val in ((t.predicate, pred), (t.subject, s), (t.object, o)):
                if is_var(term):
                    if u.setdefault(term, val) != val:
                        ok = False
                        break
                elif denote(term) != val:
                    ok = False
                    break
            if ok:
                res = _match(i, rest, u)
                if res is not None:
                    return res
    return None


def satisfies_rule(i: HerbrandInterpretation, r: Rule) -> bool:
    """Every valuation satisfying the condition also satisfies the conclusion."""
    for v in valuations(r.free_vars(), i.universe):
        if satisfies(i, v, r.condition):
            if r.is_constraint:
                return False
            c = r.conclusion
            t = (_value(c.predicate, v), _value(c.subject, v), _value(c.object, v))
            if not i.holds(c.positive, t):
                return False
    return True


def satisfies_ontology(i: HerbrandInterpretation, o: Ontology) -> bool:
    return satisfies_graph(i, o.skolem_graph()) and all(satisfies_rule(i, r) for r in o.program)


# --- semantic conditions -----------------------------------------------------------

@dataclass(frozen=True, order=True)
class Violation:
    condition: str
    witness: tuple = field(compare=False)

    def __str__(self):
        return f"condition {self.condition}: {self.witness!r}"


def check_conditions(i: HerbrandInterpretation, cfg: VocabularyConfig = DEFAULT_CONFIG) -> List[Violation]:
    """Violated interpretation conditions (numbered 2-17, plus coherence and property typing).

    An empty list means ``i`` is a coherent ERDF Herbrand interpretation.
    """
    out: List[Violation] = []
    add = lambda c, *w: out.append(Violation(c, tuple(w)))
    T, F = i.truths, i.falsities
    ct, cf, pt, pf = i.ct, i.cf, i.pt, i.pf

    for t in sorted(T & F, key=triple_key):
        add("coherence", *t)
    for t in sorted(T | F, key=triple_key):
        if (TYPE, t[0], PROPERTY) not in T:
            add("property", *t)
        for x in t:
            if x not in i.universe:
                add("2", x)
    res = ct(RESOURCE)
    for x in sorted(i.universe - res, key=term_key):
        add("2", x)
    lv = ct(LITERAL)
    for x in sorted(i.universe, key=term_key):
        if isinstance(x, PlainLiteral) and x not in lv:
            add("2", x)
    for prop, idx in ((DOMAIN, 0), (RANGE, 1)):
        cond = "3" if prop == DOMAIN else "4"
        for x, y in pt(prop):
            for pair in pt(x):
                if pair[idx] not in ct(y):
                    add(cond, x, y, pair[idx])
    classes = ct(CLASS)
    props = ct(PROPERTY)
    for x in classes:
        if (SUBCLASS, x, RESOURCE) not in T:
            add("5", x)
    for rel, kinds, ext_t, ext_f, c1, c2 in (
            (SUBCLASS, classes, ct, cf, "6", "7"), (SUBPROPERTY, props, pt, pf, "8", "9")):
        edges = pt(rel)
        for x, y in edges:
            if x not in kinds or y not in kinds:
                add(c1, x, y)
            # property extensions hold (s, o) pairs; flatten them into the witness
            for z in ext_t(x) - ext_t(y):
                add(c1, x, y, *(z if rel == SUBPROPERTY else (z,)))
            for z in ext_f(y) - ext_f(x):
                add(c1, x, y, *(z if rel == SUBPROPERTY else (z,)))
        for x in kinds:
            if (x, x) not in edges:
                add(c2, x, x)
        succ = defaultdict(set)
        for x, y in edges:
            succ[x].add(y)
        for x, y in edges:
            for z in succ[y] - succ[x]:
                add(c2, x, y, z)
    for x in ct(DATATYPE):
        if (SUBCLASS, x, LITERAL) not in T:
            add("10", x)
    for x in ct(CMP):
        if (SUBPROPERTY, x, MEMBER) not in T:
            add("11", x)
    for c in ct(TOTAL_CLASS):
        for x in i.universe - ct(c) - cf(c):
            add("12", c, x)
    for p in ct(TOTAL_PROPERTY):
        if p not in props:
            add("tprop", p)
        covered = pt(p) | pf(p)
        for x in i.universe:
            for y in i.universe:
                if (x, y) not in covered:
                    add("13", p, x, y)
    for x in i.universe:
        if isinstance(x, XmlValue) and x not in ct(XML_LITERAL):
            add("14", x)
        if is_xml_literal(x) and (x in lv or x not in cf(LITERAL)):
            add("15", x)
    for t in sorted(axiomatic_triples(cfg), key=triple_key):
        if t not in T:
            erdf_axiom = any(isinstance(x, URI) and x.iri.startswith(ERDF_NS) for x in t)
            add("17" if erdf_axiom else "16", *t)
    return sorted(out, key=lambda v: (v.condition, tuple(term_key(x) for x in v.witness)))
