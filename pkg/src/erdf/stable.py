"""Stable models, stable-model entailment and query answering.

The search works on pairs (L, F): L is a closed set of signed triples every
model below the current branch must contain, F a set of signed triples it must
not contain. Propagation alternates between the closure rules, totality
forcing and rules whose condition is already definitely true; an upper bound
U over-approximates every stable model still reachable. Candidates reached at
the leaves are checked against the chain construction of stable models with a
concrete target model, so the search only has to be complete, never exact.
See docs/algorithm.md for the soundness and completeness argument.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from .interp import (Closure, add_staged, HerbrandInterpretation, Incoherent, axiom_facts, base_engine,
                     satisfies_closed, signed_key)
from .model import (And, Atom, Exists, FalseConst, Forall, Formula, GroundingLimitError, Implies,
                    LimitError, Ontology, Or, Rule, SignedTriple, StrongNeg, TrueConst, WeakNeg,
                    denote, formula_terms, free_vars, normalize_negation, substitute, vocabulary_of)
from .terms import Variable, is_var, term_key, triple_key
from .vocab import DEFAULT_CONFIG, TOTAL_PROPERTY, TYPE, VocabularyConfig

THREE_VALUED = "three_valued"
EXACT = "exact"


@dataclass(frozen=True)
class SearchLimits:
    max_ground_rules: int = 500_000
    max_branches: int = 200_000
    max_chain_steps: int = 10_000
    persistence_mode: str = THREE_VALUED
    exact_interval_cap: int = 1 << 16
    timeout: float = 60.0

    def __post_init__(self):
        mode = self.persistence_mode.replace("-", "_")
        if mode not in (THREE_VALUED, EXACT):
            raise ValueError(f"unknown persistence mode {self.persistence_mode!r}")
        object.__setattr__(self, "persistence_mode", mode)
        for name in ("max_ground_rules", "max_branches", "max_chain_steps", "exact_interval_cap"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")


DEFAULT_LIMITS = SearchLimits()


class BranchLimitError(LimitError):
    resource = "max_branches"


class ChainLimitError(LimitError):
    resource = "max_chain_steps"


class IntervalCapError(LimitError):
    resource = "exact_interval_cap"


class SearchTimeout(LimitError):
    resource = "timeout"


@dataclass(frozen=True)
class ModelFamily:
    """A core interpretation plus total pairs that may go either way.

    Each undecided (p, s, o) is independently true or false; a choice never
    triggers further closure consequences and never changes which rules
    fire, so the family denotes 2^k interpretations.
    """

    core: HerbrandInterpretation
    undecided: FrozenSet = frozenset()
    approximate: bool = False

    @property
    def undecided_total_pairs(self) -> FrozenSet:
        return self.undecided

    @property
    def size(self) -> int:
        return 2 ** len(self.undecided)

    def member(self, true_pairs: Iterable = ()) -> HerbrandInterpretation:
        """The member with ``true_pairs`` in PT and the other undecided pairs in PF."""
        true_pairs = set(true_pairs)
        if not true_pairs <= self.undecided:
            raise ValueError("not an undecided pair of this family")
        return HerbrandInterpretation(self.core.universe, self.core.truths | true_pairs,
                                      self.core.falsities | (self.undecided - true_pairs))

    def members(self) -> Iterator[HerbrandInterpretation]:
        pairs = sorted(self.undecided, key=triple_key)
        for bits in itertools.product((False, True), repeat=len(pairs)):
            yield self.member(t for t, b in zip(pairs, bits) if b)

    def sort_key(self):
        return (sorted(triple_key(t) for t in self.core.truths),
                sorted(triple_key(t) for t in self.core.falsities),
                sorted(triple_key(t) for t in self.undecided))


Binding = FrozenSet[Tuple[str, object]]


@dataclass(frozen=True)
class AnswerSet:
    """Answer to a query: "yes"/"no" for closed formulas, else a set of bindings."""

    kind: str
    bindings: FrozenSet[Binding] = frozenset()

    @classmethod
    def from_bool(cls, b: bool) -> "AnswerSet":
        return cls("yes" if b else "no")

    @classmethod
    def from_dicts(cls, ds: Iterable[Dict]) -> "AnswerSet":
        return cls("bindings", frozenset(frozenset((k.name if is_var(k) else k, v) for k, v in d.items())
                                         for d in ds))

    def as_dicts(self) -> List[Dict[str, object]]:
        return [dict(b) for b in sorted(self.bindings, key=_binding_key)]

    def __bool__(self):
        return self.kind == "yes" or (self.kind == "bindings" and bool(self.bindings))


def _binding_key(b: Binding):
    return sorted((k, term_key(v)) for k, v in b)


# --- compiled conditions ------------------------------------------------------------
#
# Conditions are compiled to a negation normal form over model membership:
#   ("lit", pos, t)   the signed triple is in M
#   ("nlit", pos, t)  it is not in M
#   ("and", kids), ("or", kids), and the constants TRUE_N / FALSE_N.
# Quantifiers are expanded over the universe and ~ becomes a complement at
# the model level.

TRUE_N = ("T",)
FALSE_N = ("F",)


def mk_and(kids) -> tuple:
    out = []
    for k in kids:
        if k is FALSE_N:
            return FALSE_N
        if k is TRUE_N:
            continue
        if k[0] == "and":
            out.extend(k[1])
        else:
            out.append(k)
    if not out:
        return TRUE_N
    return out[0] if len(out) == 1 else ("and", tuple(out))


def mk_or(kids) -> tuple:
    out = []
    for k in kids:
        if k is TRUE_N:
            return TRUE_N
        if k is FALSE_N:
            continue
        if k[0] == "or":
            out.extend(k[1])
        else:
            out.append(k)
    if not out:
        return FALSE_N
    return out[0] if len(out) == 1 else ("or", tuple(out))


def complement(n: tuple) -> tuple:
    tag = n[0]
    if tag == "T":
        return FALSE_N
    if tag == "F":
        return TRUE_N
    if tag == "lit":
        return ("nlit", n[1], n[2])
    if tag == "nlit":
        return ("lit", n[1], n[2])
    kids = tuple(complement(k) for k in n[1])
    return ("or", kids) if tag == "and" else ("and", kids)


def node_literals(n: tuple) -> Iterator[Tuple[bool, tuple]]:
    """Signed triples mentioned by a compiled condition."""
    stack = [n]
    while stack:
        m = stack.pop()
        if m[0] in ("lit", "nlit"):
            yield (m[1], m[2])
        elif m[0] in ("and", "or"):
            stack.extend(m[1])


class Compiler:
    """Compiles ground formulas against a universe and root bounds.

    ``known`` and ``possible`` are used only for simplification and must
    hold for every model under consideration: ``known(pos, t)`` means the
    literal is in every such model, ``possible(pos, t)`` false means it is
    in none.
    """

    def __init__(self, universe, known: Callable = None, possible: Callable = None):
        self.universe = sorted(universe, key=term_key)
        self.uset = set(self.universe)
        self.known = known or (lambda pos, t: False)
        self.possible = possible or (lambda pos, t: True)
        self._guard_cache: Dict = {}

    def lit(self, pos: bool, t: tuple) -> tuple:
        if not all(x in self.uset for x in t):
            return FALSE_N
        if self.known(pos, t):
            return TRUE_N
        if not self.possible(pos, t):
            return FALSE_N
        return ("lit", pos, t)

    def _term(self, x, env):
        if is_var(x):
            return env[x]
        return denote(x)

    def _guard(self, f: Formula) -> bool:
        g = self._guard_cache.get(f)
        if g is None:
            g = all(denote(t) in self.uset for t in formula_terms(f))
            self._guard_cache[f] = g
        return g

    def compile(self, f: Formula, env: Optional[Dict] = None) -> tuple:
        return self._c(f, env or {})

    def _c(self, f: Formula, env: Dict) -> tuple:
        if isinstance(f, Atom):
            return self.lit(True, (self._term(f.predicate, env), self._term(f.subject, env),
                                   self._term(f.object, env)))
        if isinstance(f, StrongNeg):
            b = f.body
            if isinstance(b, Atom):
                return self.lit(False, (self._term(b.predicate, env), self._term(b.subject, env),
                                        self._term(b.object, env)))
            return self._c(normalize_negation(f), env)
        if isinstance(f, WeakNeg):
            if not self._guard(f.body):
                return FALSE_N
            return complement(self._c(f.body, env))
        if isinstance(f, And):
            left = self._c(f.left, env)
            if left is FALSE_N:
                return FALSE_N
            return mk_and((left, self._c(f.right, env)))
        if isinstance(f, Or):
            left = self._c(f.left, env)
            if left is TRUE_N:
                return TRUE_N
            return mk_or((left, self._c(f.right, env)))
        if isinstance(f, Implies):
            return self._c(Or(WeakNeg(f.left), f.right), env)
        if isinstance(f, Exists):
            kids = []
            for x in self.universe:
                k = self._c(f.body, {**env, f.var: x})
                if k is TRUE_N:
                    return TRUE_N
                kids.append(k)
            return mk_or(kids)
        if isinstance(f, Forall):
            kids = []
            for x in self.universe:
                k = self._c(f.body, {**env, f.var: x})
                if k is FALSE_N:
                    return FALSE_N
                kids.append(k)
            return mk_and(kids)
        if isinstance(f, TrueConst):
            return TRUE_N
        if isinstance(f, FalseConst):
            return FALSE_N
        raise TypeError(f"not a formula: {f!r}")


# --- three-valued evaluation -------------------------------------------------------

T, F, U = 1, 0, 2
SUPERVALUATION_ATOMS = 3


class Evaluator:
    """Strong-Kleene evaluation of compiled conditions over an interval.

    ``status(pos, t)`` gives T/F/U for "the signed triple is in M" and
    ``total(t)`` whether the pair is known to be decided one way or the
    other. At connective nodes that come out undefined over at most three
    undecided triples the node is re-evaluated under every admissible joint
    state of those triples (coherent, and decided when total), which makes
    e.g. p(s,o) | -p(s,o) true for a total p.
    """

    def __init__(self, status: Callable, total: Callable):
        self.status = status
        self.total = total

    def value(self, n: tuple) -> int:
        return self._ev(n, None)[0]

    def value_and_atoms(self, n: tuple) -> Tuple[int, List[Tuple[bool, tuple]]]:
        """Value plus the undefined signed triples, in first-occurrence order."""
        v, atoms = self._ev(n, None)
        return v, list(dict.fromkeys(atoms)) if v == U else []

    def _ev(self, n: tuple, fixed: Optional[Dict]) -> Tuple[int, list]:
        tag = n[0]
        if tag == "lit" or tag == "nlit":
            pos, t = n[1], n[2]
            if fixed is not None and t in fixed:
                v = T if fixed[t][0 if pos else 1] else F
            else:
                v = self.status(pos, t)
            if tag == "nlit" and v != U:
                v = T if v == F else F
            return v, ([(pos, t)] if v == U else [])
        if tag == "T":
            return T, []
        if tag == "F":
            return F, []
        is_and = tag == "and"
        stop = F if is_and else T
        atoms: list = []
        undefined = False
        for k in n[1]:
            v, a = self._ev(k, fixed)
            if v == stop:
                return stop, []
            if v == U:
                undefined = True
                atoms.extend(a)
        if not undefined:
            return (T if is_and else F), []
        triples = list(dict.fromkeys(t for _, t in atoms))
        if len(triples) <= SUPERVALUATION_ATOMS:
            sv = self._supervalue(n, triples, fixed)
            if sv != U:
                return sv, []
        return U, atoms

    def _states(self, t: tuple, fixed: Optional[Dict]):
        sp, sn = self.status(True, t), self.status(False, t)
        out = []
        for a in (True, False):
            for b in (True, False):
                if a and b:
                    continue
                if not a and not b and self.total(t):
                    continue
                if (sp == T and not a) or (sp == F and a) or (sn == T and not b) or (sn == F and b):
                    continue
                out.append((a, b))
        return out

    def _supervalue(self, n: tuple, triples: list, fixed: Optional[Dict]) -> int:
        seen = set()
        choices = [self._states(t, fixed) for t in triples]
        for combo in itertools.product(*choices):
            f2 = dict(fixed or {})
            f2.update(zip(triples, combo))
            v, _ = self._ev(n, f2)
            seen.add(v)
            if len(seen) > 1:
                return U
        if not seen:
            # no admissible state: the branch itself is contradictory
            return U
        return seen.pop()

    def value_fixed(self, n: tuple, fixed: Dict) -> int:
        return self._ev(n, fixed)[0]


# --- ground rule instances ------------------------------------------------------------

class Inst:
    """One ground instance of a program rule with its compiled condition."""

    __slots__ = ("rule_no", "env", "conclusion", "cond", "key")

    def __init__(self, rule_no: int, env: Dict, conclusion, cond: tuple, key):
        self.rule_no = rule_no
        self.env = env
        self.conclusion = conclusion  # (pos, triple) or None for a constraint
        self.cond = cond
        self.key = key

    def __repr__(self):
        return f"Inst(rule {self.rule_no}, {self.env}, {self.conclusion})"


def _top_literals(f: Formula) -> List[Tuple[bool, Atom]]:
    """Atom / strong-negated atom conjuncts at the top of a condition."""
    if isinstance(f, And):
        return _top_literals(f.left) + _top_literals(f.right)
    if isinstance(f, Atom):
        return [(True, f)]
    if isinstance(f, StrongNeg) and isinstance(f.body, Atom):
        return [(False, f.body)]
    return []


def _join(lits: List[Tuple[bool, Atom]], env: Dict, index: Callable) -> Iterator[Dict]:
    """Bindings of the literals' variables to facts from ``index(pos, p) -> {(s, o)}``."""
    if not lits:
        yield env
        return

    def unbound(item):
        return sum(1 for x in (item[1].predicate, item[1].subject, item[1].object)
                   if is_var(x) and x not in env)
    k = min(range(len(lits)), key=lambda j: unbound(lits[j]))
    pos, a = lits[k]
    rest = lits[:k] + lits[k + 1:]
    if is_var(a.predicate) and a.predicate not in env:
        preds = index(pos, None)
    else:
        preds = [env[a.predicate] if is_var(a.predicate) else denote(a.predicate)]
    for p in preds:
        for s, o in index(pos, p):
            e = dict(env)
            ok = True
            for term, val in ((a.predicate, p), (a.subject, s), (a.object, o)):
                if is_var(term):
                    if e.setdefault(term, val) != val:
                        ok = False
                        break
                elif denote(term) != val:
                    ok = False
                    break
            if ok:
                yield from _join(rest, e, index)


def ground_instances(program: Sequence[Rule], comp: Compiler, index: Optional[Callable],
                     skip_known: Callable, cap: int) -> List[Inst]:
    """Relevance-grounded instances of ``program``.

    Free variables are first bound by joining the top-level positive literal
    conjuncts of each condition against ``index`` (the facts any model can
    contain); variables still unbound range over the universe. Instances
    whose compiled condition is false, or whose conclusion is already known,
    are dropped. ``index`` None means every fact is possible.
    """
    out: List[Inst] = []
    budget = 0
    for no, r in enumerate(program):
        fv = sorted(r.free_vars(), key=lambda v: v.name)
        lits = _top_literals(r.condition) if index is not None else []
        seen = set()
        for env in _join(lits, {}, index) if index is not None else iter([{}]):
            rest = [v for v in fv if v not in env]
            budget += len(comp.universe) ** len(rest)
            if budget > cap:
                raise GroundingLimitError(r, budget, cap)
            for combo in itertools.product(comp.universe, repeat=len(rest)):
                e = dict(env)
                e.update(zip(rest, combo))
                key = tuple(term_key(e[v]) for v in fv)
                if key in seen:
                    continue
                seen.add(key)
                if r.is_constraint:
                    concl = None
                else:
                    c = r.conclusion
                    concl = (c.positive, tuple(e[x] if is_var(x) else denote(x) for x in c.terms))
                    if skip_known(*concl):
                        continue
                cond = comp.compile(r.condition, e)
                if cond is FALSE_N:
                    continue
                out.append(Inst(no, {v: e[v] for v in fv}, concl, cond, (no, key)))
    out.sort(key=lambda i: i.key)
    return out


# --- the solver ---------------------------------------------------------------------------

class _Index:
    """Read-only pt/pf/ct/cf access for a fixed interpretation."""

    def __init__(self, truths, falsities):
        self.truths = truths
        self.falsities = falsities
        self.pt: Dict = {}
        self.pf: Dict = {}
        self.ct: Dict = {}
        self.cf: Dict = {}
        for store, by_p, by_c in ((truths, self.pt, self.ct), (falsities, self.pf, self.cf)):
            for p, s, o in store:
                by_p.setdefault(p, set()).add((s, o))
                if p == TYPE:
                    by_c.setdefault(o, set()).add(s)

    def holds(self, pos, t):
        return t in (self.truths if pos else self.falsities)


def _as_index(m) -> _Index:
    if isinstance(m, _Index):
        return m
    return _Index(m.truths, m.falsities)


@dataclass
class ChainResult:
    ok: bool
    approximate: bool = False
    steps: int = 0

    def __bool__(self):
        return self.ok


@dataclass
class SolveReport:
    families: List[ModelFamily]
    incoherent: Optional[Incoherent] = None
    approximate: bool = False
    stats: Dict = field(default_factory=dict)


class Solver:
    """Stable-model search for one ontology under fixed limits."""

    def __init__(self, o: Ontology, cfg: VocabularyConfig = DEFAULT_CONFIG,
                 limits: SearchLimits = DEFAULT_LIMITS):
        self.o = o
        self.cfg = cfg
        self.limits = limits
        self.started = time.monotonic()
        self.branches = 0
        self.chain_checks = 0
        self.approximate = False
        root = base_engine(o, cfg)
        self.universe = sorted(root.universe, key=term_key)
        self.incoherent: Optional[Incoherent] = add_staged(root, o.skolem_graph())
        self.root = root
        self.insts: List[Inst] = []
        self.root_upper = None
        if self.incoherent is None:
            self._ground_root()

    # --- bookkeeping ---------------------------------------------------------------

    def _tick(self):
        if time.monotonic() - self.started > self.limits.timeout:
            raise SearchTimeout(f"search exceeded {self.limits.timeout}s")

    def _branch(self):
        self.branches += 1
        if self.branches > self.limits.max_branches:
            raise BranchLimitError(f"search exceeded {self.limits.max_branches} branches")
        self._tick()

    def stats(self) -> Dict:
        return {"universe": len(self.universe), "ground_instances": len(self.insts),
                "branches": self.branches, "chain_checks": self.chain_checks,
                "seconds": round(time.monotonic() - self.started, 3)}

    @staticmethod
    def _everything(e: Closure) -> bool:
        return (TYPE, TYPE, TOTAL_PROPERTY) in e.truths

    def _saturate(self, e: Closure, done: Set, fp=frozenset(), fn=frozenset()) -> List:
        """Both signs of every pair of each (possibly) total property or class."""
        new = []
        for p in sorted(e.total_properties - done[0], key=term_key):
            done[0].add(p)
            for x in self.universe:
                for y in self.universe:
                    t = (p, x, y)
                    if t not in fp:
                        new.append((True, t))
                    if t not in fn:
                        new.append((False, t))
        for c in sorted(e.total_classes - done[1], key=term_key):
            done[1].add(c)
            for x in self.universe:
                t = (TYPE, x, c)
                if t not in fp:
                    new.append((True, t))
                if t not in fn:
                    new.append((False, t))
        return new

    # --- root grounding --------------------------------------------------------------

    def _ground_root(self):
        root = self.root
        insts: List[Inst] = []
        size = None
        while True:
            ub = self._root_bound(insts)
            n = -1 if ub is None else len(ub.truths) + len(ub.falsities)
            if n == size:
                break
            size = n
            if ub is None:
                possible = lambda pos, t: not root.holds(not pos, t)
                index = None
            else:
                possible = ub.holds
                index = lambda pos, p, ub=ub: (list(ub.pt if pos else ub.pf) if p is None
                                                else (ub.pt if pos else ub.pf).get(p, ()))
            comp = Compiler(self.universe, known=root.holds, possible=possible)
            insts = ground_instances(self.o.program, comp, index, root.holds,
                                     self.limits.max_ground_rules)
            self._tick()
        self.insts = insts
        self.root_upper = ub

    def _root_bound(self, insts: List[Inst]) -> Optional[Closure]:
        e = self.root.copy()
        done = (set(), set())
        while True:
            if self._everything(e):
                return None
            new = self._saturate(e, done)
            new += [i.conclusion for i in insts
                    if i.conclusion is not None and not e.holds(*i.conclusion)]
            if not new:
                return e
            e.add(new)

    # --- node bounds and evaluation -------------------------------------------------------

    def _upper(self, L: Closure, fp, fn, active: List[Inst]) -> Optional[Closure]:
        e = L.copy()
        done = (set(), set())
        while True:
            if self._everything(e):
                return None
            new = self._saturate(e, done, fp, fn)
            if new:
                e.add(new)
                continue
            ev = self._evaluator(L, fp, fn, e)
            new = [i.conclusion for i in active
                   if i.conclusion is not None and not e.holds(*i.conclusion)
                   and ev.value(i.cond) != F]
            if not new:
                return e
            e.add(new)

    @staticmethod
    def _status(L: Closure, fp, fn, ub: Optional[Closure]) -> Callable:
        lt, lf = L.truths, L.falsities
        if ub is None:
            def st(pos, t):
                if pos:
                    return T if t in lt else (F if t in fp or t in lf else U)
                return T if t in lf else (F if t in fn or t in lt else U)
        else:
            ut, uf = ub.truths, ub.falsities

            def st(pos, t):
                if pos:
                    if t in lt:
                        return T
                    return F if t in fp or t in lf or t not in ut else U
                if t in lf:
                    return T
                return F if t in fn or t in lt or t not in uf else U
        return st

    @staticmethod
    def _total(e) -> Callable:
        tp, tc = e.total_properties, e.total_classes

        def total(t):
            return t[0] in tp or (t[0] == TYPE and t[2] in tc)
        return total

    def _evaluator(self, L, fp, fn, ub) -> Evaluator:
        return Evaluator(self._status(L, fp, fn, ub), self._total(L))

    def _undecided_pairs(self, L: Closure) -> List[tuple]:
        lt, lf = L.truths, L.falsities
        out = []
        for p in sorted(L.total_properties, key=term_key):
            for x in self.universe:
                for y in self.universe:
                    t = (p, x, y)
                    if t not in lt and t not in lf:
                        out.append(t)
        for c in sorted(L.total_classes, key=term_key):
            if TYPE in L.total_properties:
                continue
            for x in self.universe:
                t = (TYPE, x, c)
                if t not in lt and t not in lf:
                    out.append(t)
        return out

    def _force_totals(self, L: Closure, fp, fn, ub, st) -> List:
        tp, tc = L.total_properties, L.total_classes
        if not tp and not tc:
            return []
        total = self._total(L)
        out = []
        if ub is None:
            out += [(False, t) for t in fp if total(t) and t not in L.falsities]
            out += [(True, t) for t in fn if total(t) and t not in L.truths]
            return out
        for t in self._undecided_pairs(L):
            if st(True, t) == F:
                out.append((False, t))
            elif st(False, t) == F:
                out.append((True, t))
        return out

    def _propagate(self, L: Closure, fp, fn, active: List[Inst], goal):
        while True:
            self._tick()
            if L.clashes or any(t in L.truths for t in fp) or any(t in L.falsities for t in fn):
                return None
            ub = self._upper(L, fp, fn, active)
            st = self._status(L, fp, fn, ub)
            ev = Evaluator(st, self._total(L))
            forced = self._force_totals(L, fp, fn, ub, st)
            still = []
            for inst in active:
                v = ev.value(inst.cond)
                if v == T:
                    if inst.conclusion is None:
                        return None
                    s = st(*inst.conclusion)
                    if s == F:
                        return None
                    if s == U:
                        forced.append(inst.conclusion)
                elif v == U:
                    still.append(inst)
            active = still
            if goal is not None and ev.value(goal) == F:
                return None
            if not forced:
                return ub, ev, active
            L.add(forced)

    # --- branching -------------------------------------------------------------------------

    @staticmethod
    def _absorbed(inst: Inst, atoms, ev: Evaluator) -> Optional[tuple]:
        """The total pair that alone decides ``inst`` either way, if any."""
        triples = {t for _, t in atoms}
        if len(triples) != 1:
            return None
        t = next(iter(triples))
        if not ev.total(t):
            return None
        for state in ((True, False), (False, True)):
            v = ev.value_fixed(inst.cond, {t: state})
            if v == U:
                return None
            if v == T:
                if inst.conclusion is None:
                    return None
                own = (state[0], t)
                if inst.conclusion != own and ev.status(*inst.conclusion) != T:
                    return None
        return t

    def _free(self, L: Closure, t: tuple) -> bool:
        for pos in (True, False):
            cons = L.consequences(pos, t)
            if cons is None or any(not L.holds(*c) for c in cons):
                return False
        return True

    def search(self, goal: Optional[tuple] = None, witness: bool = False) -> Iterator:
        """Depth-first search. Yields ModelFamily objects, or in witness mode
        verified stable models (HerbrandInterpretation) satisfying ``goal``."""
        if self.incoherent is not None:
            return
        stack = [(self.root.copy(), frozenset(), frozenset(), self.insts)]
        while stack:
            L, fp, fn, active = stack.pop()
            self._branch()
            res = self._propagate(L, fp, fn, active, goal)
            if res is None:
                continue
            ub, ev, active = res
            lit = None
            if goal is not None:
                gv, gatoms = ev.value_and_atoms(goal)
                if gv == U:
                    lit = gatoms[0]
            absorbed: Set = set()
            if lit is None:
                for inst in active:
                    v, atoms = ev.value_and_atoms(inst.cond)
                    pair = self._absorbed(inst, atoms, ev)
                    if pair is None:
                        lit = atoms[0]
                        break
                    absorbed.add(pair)
            if lit is not None:
                pos, t = lit
                child = L.copy()
                child.add([lit])
                rest = (fp | {t}, fn) if pos else (fp, fn | {t})
                # explored second: the literal is absent
                stack.append((L, rest[0], rest[1], active))
                stack.append((child, fp, fn, active))
                continue
            pairs = self._undecided_pairs(L)
            outcome = self._leaf(L, pairs, active, witness)
            if isinstance(outcome, tuple) and outcome[0] == "branch":
                t = outcome[1]
                for pos in (False, True):
                    child = L.copy()
                    child.add([(pos, t)])
                    stack.append((child, fp, fn, active))
                continue
            if outcome is not None:
                yield outcome
                if witness:
                    return

    def _leaf(self, L: Closure, pairs: List[tuple], active: List[Inst], witness: bool):
        if witness:
            for pos in (False, True):
                m = L.copy()
                m.add([(pos, t) for t in pairs])
                if m.clashes or self._undecided_pairs(m):
                    continue
                if self.verify(m):
                    return m.freeze()
            return ("branch", pairs[0]) if pairs else None
        for t in pairs:
            if not self._free(L, t):
                return ("branch", t)
        reps = []
        for pos in (False, True):
            m = L.copy()
            m.add([(pos, t) for t in pairs])
            reps.append(m)
            if not pairs:
                break
        if all(self.verify(m) for m in reps):
            return ModelFamily(L.freeze(), frozenset(pairs))
        return ("branch", pairs[0]) if pairs else None

    # --- chain verification ------------------------------------------------------------------

    def _tc(self, e: Closure, m: _Index, done: Tuple[Set, Set]):
        """Copy M's atoms for every property/class that is total in ``e``."""
        while True:
            new = []
            for p in e.total_properties - done[0]:
                done[0].add(p)
                new += [(True, (p, s, o)) for s, o in m.pt.get(p, ())]
                new += [(False, (p, s, o)) for s, o in m.pf.get(p, ())]
            for c in e.total_classes - done[1]:
                done[1].add(c)
                new += [(True, (TYPE, x, c)) for x in m.ct.get(c, ())]
                new += [(False, (TYPE, x, c)) for x in m.cf.get(c, ())]
            if not new:
                return
            e.add(new)

    def verify(self, m, mode: Optional[str] = None, insts: Optional[List[Inst]] = None) -> ChainResult:
        """Whether M is reached by the stable-model chain (M must be a closed model candidate)."""
        mode = mode or self.limits.persistence_mode
        insts = self.insts if insts is None else insts
        self.chain_checks += 1
        mi = _as_index(m)
        if self.incoherent is not None:
            return ChainResult(False)
        i = self.root.copy()
        done = (set(), set())
        self._tc(i, mi, done)
        steps = 0
        approx = False
        while True:
            self._tick()
            if not (i.truths <= mi.truths and i.falsities <= mi.falsities):
                return ChainResult(False, approx, steps)
            lt, lf = i.truths, i.falsities

            def st(pos, t):
                if t in (lt if pos else lf):
                    return T
                return U if mi.holds(pos, t) else F
            ev = Evaluator(st, self._total(i))
            new = []
            for inst in insts:
                v = ev.value(inst.cond)
                if v == U:
                    if mode == EXACT:
                        v = self._exact(inst, i, mi, st)
                    else:
                        approx = True
                if v == T:
                    if inst.conclusion is None or not mi.holds(*inst.conclusion):
                        return ChainResult(False, approx, steps)
                    if not i.holds(*inst.conclusion):
                        new.append(inst.conclusion)
            if not new:
                break
            steps += 1
            if steps > self.limits.max_chain_steps:
                raise ChainLimitError(f"chain longer than {self.limits.max_chain_steps} steps")
            i.add(new)
            self._tc(i, mi, done)
        ok = len(i.truths) == len(mi.truths) and len(i.falsities) == len(mi.falsities)
        if not ok and approx and mode == THREE_VALUED:
            try:
                return self.verify(m, EXACT, insts)
            except IntervalCapError:
                self.approximate = True
                return ChainResult(False, True, steps)
        return ChainResult(ok, approx and not ok, steps)

    def _exact(self, inst: Inst, i: Closure, mi: _Index, st) -> int:
        """Persistence of one rule over every interpretation J with I <= J <= M."""
        atoms = list(dict.fromkeys(a for a in node_literals(inst.cond) if st(*a) == U))
        if 2 ** len(atoms) > self.limits.exact_interval_cap:
            raise IntervalCapError(f"interval has {2 ** len(atoms)} atom assignments "
                                   f"(cap {self.limits.exact_interval_cap})")
        for bits in itertools.product((True, False), repeat=len(atoms)):
            chosen = [a for a, b in zip(atoms, bits) if b]
            j = i.copy()
            j.add(chosen)
            self._tc(j, mi, (set(), set()))
            if any(j.holds(*a) for a, b in zip(atoms, bits) if not b):
                continue
            ev = Evaluator(lambda pos, t, j=j: T if j.holds(pos, t) else F, self._total(j))
            if ev.value(inst.cond) != T:
                return F
        return T


# --- public operations ---------------------------------------------------------------------

class BruteForceCapError(LimitError):
    resource = "bruteforce_cap"


@dataclass
class Verdict:
    """Entailment result; truthy iff entailed."""

    entailed: bool
    approximate: bool = False
    counter_model: Optional[HerbrandInterpretation] = None

    def __bool__(self):
        return self.entailed


def _as_formula(f) -> Formula:
    if isinstance(f, Formula):
        return f
    from .model import formula_of_graph
    return formula_of_graph(f)


def _universal_closure(f: Formula) -> Formula:
    for v in sorted(free_vars(f), key=lambda x: x.name, reverse=True):
        f = Forall(v, f)
    return f


def _query_compiler(s: Solver) -> Compiler:
    ub = s.root_upper
    possible = (lambda pos, t: not s.root.holds(not pos, t)) if ub is None else ub.holds
    return Compiler(s.universe, known=s.root.holds, possible=possible)


def solve(o: Ontology, limits: SearchLimits = DEFAULT_LIMITS,
          cfg: VocabularyConfig = DEFAULT_CONFIG) -> SolveReport:
    """Enumerate stable model families together with search statistics."""
    s = Solver(o, cfg, limits)
    fams = {}
    for fam in s.search():
        fams[(fam.core.truths, fam.core.falsities, fam.undecided)] = fam
    out = sorted(fams.values(), key=ModelFamily.sort_key)
    return SolveReport(out, s.incoherent, s.approximate, s.stats())


def stable_models(o: Ontology, limits: SearchLimits = DEFAULT_LIMITS,
                  cfg: VocabularyConfig = DEFAULT_CONFIG) -> List[ModelFamily]:
    """All stable models, grouped into families, in canonical order."""
    return solve(o, limits, cfg).families


def minimal_graph_models(o: Ontology, cfg: VocabularyConfig = DEFAULT_CONFIG,
                         limits: SearchLimits = DEFAULT_LIMITS) -> List[ModelFamily]:
    """The closure of sk(G) with its totality-unforced pairs left open; [] if incoherent."""
    eng = base_engine(o, cfg)
    eng.add(o.skolem_graph())
    if eng.clashes:
        return []
    s = Solver.__new__(Solver)
    s.universe = sorted(eng.universe, key=term_key)
    return [ModelFamily(eng.freeze(), frozenset(Solver._undecided_pairs(s, eng)))]


def entails(o: Ontology, f, limits: SearchLimits = DEFAULT_LIMITS,
            cfg: VocabularyConfig = DEFAULT_CONFIG) -> Verdict:
    """Whether every stable model satisfies ``f`` (a formula or a graph).

    Runs a goal-directed search for a stable model violating ``f``; free
    variables are read universally.
    """
    f = _as_formula(f)
    s = Solver(o, cfg, limits)
    if s.incoherent is not None:
        return Verdict(True)
    node = _query_compiler(s).compile(_universal_closure(f))
    witness = next(s.search(goal=complement(node), witness=True), None)
    if witness is not None and satisfies_closed(witness, f):
        raise AssertionError("counter-model satisfies the query")
    return Verdict(witness is None, s.approximate, witness)


def _family_status(fam: ModelFamily) -> Tuple[Callable, Callable]:
    core, und = fam.core, fam.undecided

    def st(pos, t):
        if core.holds(pos, t):
            return T
        return U if t in und else F
    return st, (lambda t: t in und)


def _modal(n: tuple, st: Callable, total: Callable, box: bool, fixed: Dict) -> bool:
    """□ (box) or ◇ of a compiled formula over a family's completions."""
    def st2(pos, t):
        if t in fixed:
            return T if fixed[t][0 if pos else 1] else F
        return st(pos, t)
    ev = Evaluator(st2, total)
    v, atoms = ev.value_and_atoms(n)
    if v != U:
        return v == T
    if box and n[0] == "and":
        return all(_modal(k, st, total, box, fixed) for k in n[1])
    if not box and n[0] == "or":
        return any(_modal(k, st, total, box, fixed) for k in n[1])
    t = atoms[0][1]
    results = (_modal(n, st, total, box, {**fixed, t: state})
               for state in ((True, False), (False, True)))
    return all(results) if box else any(results)


def holds_in_all(fam: ModelFamily, node: tuple) -> bool:
    st, total = _family_status(fam)
    return _modal(node, st, total, True, {})


def holds_in_some(fam: ModelFamily, node: tuple) -> bool:
    st, total = _family_status(fam)
    return _modal(node, st, total, False, {})


def _valuations(o: Ontology, cfg, f: Formula) -> Tuple[List[Variable], List[Dict]]:
    fv = sorted(free_vars(f), key=lambda v: v.name)
    vocab = sorted(vocabulary_of(o, cfg), key=term_key)
    return fv, [dict(zip(fv, combo)) for combo in itertools.product(vocab, repeat=len(fv))]


def stable_answers(o: Ontology, f: Formula, limits: SearchLimits = DEFAULT_LIMITS,
                   cfg: VocabularyConfig = DEFAULT_CONFIG) -> AnswerSet:
    """Skeptical answers: yes/no for closed queries, else the bindings true in every stable model."""
    if not free_vars(f):
        return AnswerSet.from_bool(bool(entails(o, f, limits, cfg)))
    s = Solver(o, cfg, limits)
    fams = [] if s.incoherent else stable_models(o, limits, cfg)
    comp = Compiler(s.universe)
    fv, vals = _valuations(o, cfg, f)
    good = []
    for v in vals:
        node = comp.compile(substitute(f, v))
        if all(holds_in_all(fam, node) for fam in fams):
            good.append(v)
    return AnswerSet.from_dicts(good)


def credulous_answers(o: Ontology, f: Formula, limits: SearchLimits = DEFAULT_LIMITS,
                      cfg: VocabularyConfig = DEFAULT_CONFIG):
    """Credulous answers: an AnswerSet for closed queries, else the sorted list
    of distinct non-empty per-model binding sets."""
    s = Solver(o, cfg, limits)
    fams = [] if s.incoherent else stable_models(o, limits, cfg)
    comp = Compiler(s.universe)
    if not free_vars(f):
        node = comp.compile(f)
        return AnswerSet.from_bool(any(holds_in_some(fam, node) for fam in fams))
    fv, vals = _valuations(o, cfg, f)
    nodes = [(v, comp.compile(substitute(f, v))) for v in vals]
    out = set()
    for fam in fams:
        relevant = sorted({t for _, n in nodes for _, t in node_literals(n) if t in fam.undecided},
                          key=triple_key)
        if 2 ** len(relevant) > limits.max_branches:
            raise BranchLimitError(f"{len(relevant)} undecided pairs bear on the query")
        st, total = _family_status(fam)
        for bits in itertools.product((True, False), repeat=len(relevant)):
            fixed = {t: (b, not b) for t, b in zip(relevant, bits)}
            ans = [v for v, n in nodes if _modal(n, st, total, True, fixed)]
            if ans:
                out.add(AnswerSet.from_dicts(ans))
    return sorted(out, key=lambda a: [_binding_key(b) for b in sorted(a.bindings, key=_binding_key)])


def persistent_rules(i: HerbrandInterpretation, m: HerbrandInterpretation, p_ground: Iterable[Rule],
                     mode: str = THREE_VALUED, cap: int = DEFAULT_LIMITS.exact_interval_cap) -> List[Rule]:
    """Ground rules whose condition holds in every interpretation J with I <= J <= M.

    ``three_valued`` keeps the rules whose condition is definitely true under
    the interval reading (true if in I, false if outside M); ``exact`` also
    settles the undefined ones by enumerating the interval.
    """
    mode = mode.replace("-", "_")
    comp = Compiler(i.universe)
    s = Solver.__new__(Solver)
    s.limits = SearchLimits(exact_interval_cap=cap)
    s.started = time.monotonic()
    mi = _as_index(m)
    eng = Closure(sorted(i.universe, key=term_key))
    eng.add((True,) + t for t in i.truths)
    eng.add((False,) + t for t in i.falsities)

    def st(pos, t):
        if i.holds(pos, t):
            return T
        return U if mi.holds(pos, t) else F
    ev = Evaluator(st, Solver._total(eng))
    out = []
    for r in p_ground:
        node = comp.compile(r.condition)
        v = ev.value(node)
        if v == U and mode == EXACT:
            v = Solver._exact(s, Inst(0, {}, None, node, ()), eng, mi, st)
        if v == T:
            out.append(r)
    return out


def chain_verify(o: Ontology, m: HerbrandInterpretation, limits: SearchLimits = DEFAULT_LIMITS,
                 cfg: VocabularyConfig = DEFAULT_CONFIG) -> ChainResult:
    """Whether ``m`` is a stable model: the chain from the minimal graph model below M reaches M."""
    s = Solver(o, cfg, limits)
    if s.incoherent is not None:
        return ChainResult(False)
    mi = _as_index(m)
    comp = Compiler(s.universe, known=s.root.holds, possible=mi.holds)
    index = lambda pos, p: list(mi.pt if pos else mi.pf) if p is None else (mi.pt if pos else mi.pf).get(p, ())
    insts = ground_instances(o.program, comp, index, s.root.holds, limits.max_ground_rules)
    # M has to satisfy every rule, persistent or not
    for inst in insts:
        ev = Evaluator(lambda pos, t: T if mi.holds(pos, t) else F, lambda t: False)
        if ev.value(inst.cond) == T and (inst.conclusion is None or not mi.holds(*inst.conclusion)):
            return ChainResult(False)
    return s.verify(mi, insts=insts)


def relevant_atoms(s: Solver) -> List[Tuple[bool, tuple]]:
    """Signed triples some rule instance mentions that the graph closure leaves open.

    Uses the full grounding (every free variable over the universe), not the
    solver's relevance-pruned instances, so unsupported atoms are included.
    """
    root = s.root
    comp = Compiler(s.universe, known=root.holds, possible=lambda pos, t: not root.holds(not pos, t))
    insts = ground_instances(s.o.program, comp, None, lambda pos, t: False, s.limits.max_ground_rules)
    total = Solver._total(root)
    out = set()
    for inst in insts:
        lits = list(node_literals(inst.cond))
        if inst.conclusion is not None:
            lits.append(inst.conclusion)
        for pos, t in lits:
            for q in ((pos, t), (not pos, t)) if total(t) else ((pos, t),):
                if not root.holds(*q) and not root.holds(not q[0], t):
                    out.add(q)
    return sorted(out, key=signed_key_pair)


def signed_key_pair(a):
    return (not a[0],) + triple_key(a[1])


def herbrand_candidates(o: Ontology, cap: int = 14, cfg: VocabularyConfig = DEFAULT_CONFIG,
                        limits: SearchLimits = DEFAULT_LIMITS) -> Iterator[HerbrandInterpretation]:
    """Interpretations of the lattice spanned by the relevant atoms.

    Every subset S of the relevant atoms gives J = close(sk(G) + S) with any
    remaining total pairs set false; J is yielded when it is coherent, total
    and adds no relevant atom outside S. Rules are not consulted.
    """
    s = Solver(o, cfg, limits)
    if s.incoherent is not None:
        return
    atoms = relevant_atoms(s)
    if len(atoms) > cap:
        raise BruteForceCapError(f"{len(atoms)} relevant atoms (cap {cap})")
    aset = set(atoms)
    for bits in itertools.product((False, True), repeat=len(atoms)):
        chosen = [a for a, b in zip(atoms, bits) if b]
        e = s.root.copy()
        e.add(chosen)
        if e.clashes:
            continue
        e.add([(False, t) for t in s._undecided_pairs(e)])
        if e.clashes or s._undecided_pairs(e):
            continue
        if {a for a in aset if e.holds(*a)} != set(chosen):
            continue
        yield e.freeze()


def herbrand_models_bruteforce(o: Ontology, cap: int = 14, cfg: VocabularyConfig = DEFAULT_CONFIG,
                               limits: SearchLimits = DEFAULT_LIMITS) -> List[HerbrandInterpretation]:
    """Herbrand models of O among ``herbrand_candidates``.

    Rules are checked with the plain satisfaction relation, not the solver's
    compiled conditions, so this is an independent oracle for small O.
    """
    from .interp import satisfies_rule
    out = [j for j in herbrand_candidates(o, cap, cfg, limits)
           if all(satisfies_rule(j, r) for r in o.program)]
    return sorted(out, key=lambda j: (sorted(triple_key(t) for t in j.truths),
                                      sorted(triple_key(t) for t in j.falsities)))
