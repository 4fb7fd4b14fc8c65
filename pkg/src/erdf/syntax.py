"""Reader and writer for the line-oriented ``.erdf`` text format.

See docs/grammar.md for the EBNF. In short::

    @prefix : <http://example.org/> .
    graph { likes(Gerd, Riesling). -likes(Carlos, Riesling). }
    rules { p(?x, ?y) <- ~q(?x, ?y). false <- p(a, b) & q(a, b). }
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

from .model import (FALSE, TRUE, And, Atom, Exists, FalseConst, Forall, Formula, Implies,
                    Ontology, Or, Rule, SignedTriple, StrongNeg, TrueConst, WeakNeg,
                    canonical_triples, variable_discipline_violation)
from .terms import URI, PlainLiteral, Term, TypedLiteral, Variable
from .vocab import STANDARD_PREFIXES

DEFAULT_NAMESPACE = "http://example.org/"
KEYWORDS = {"graph", "rules", "true", "false", "exists", "forall"}


class ParseError(ValueError):
    def __init__(self, line: int, column: int, message: str, token: str = ""):
        super().__init__(f"{line}:{column}: {message}" + (f" (at {token!r})" if token else ""))
        self.line = line
        self.column = column
        self.message = message
        self.token = token


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<prefixkw>@prefix\b)
  | (?P<lang>@[A-Za-z]+(?:-[A-Za-z0-9]+)*)
  | (?P<arrow><-)
  | (?P<implies>=>)
  | (?P<iri><[^<>"{}|^`\\\s]*>)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<dtype>\^\^)
  | (?P<var>\?[A-Za-z_][A-Za-z0-9_]*)
  | (?P<name>(?:[A-Za-z_][A-Za-z0-9_]*)?:[A-Za-z0-9_]*|[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[(){},.&|~-])
""", re.VERBOSE)

_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t", "r": "\r"}


def tokenize(text: str) -> List[Token]:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(line, col, "unexpected character", text[pos])
        kind = m.lastgroup
        tok = m.group()
        if kind != "ws":
            out.append(Token(kind if kind != "punct" else tok, tok, line, col))
        nl = tok.count("\n")
        if nl:
            line += nl
            line_start = pos + tok.rfind("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


def _unescape(s: str) -> str:
    return re.sub(r"\\(.)", lambda m: _ESCAPES.get(m.group(1), m.group(1)), s)


class _Parser:
    def __init__(self, text: str, prefixes: Dict[str, str]):
        self.toks = tokenize(text)
        self.i = 0
        self.prefixes = dict(prefixes)

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        raise ParseError(tok.line, tok.col, message, tok.text or "<end of input>")

    def accept(self, kind: str, text: Optional[str] = None) -> Optional[Token]:
        t = self.tok
        if t.kind == kind and (text is None or t.text == text):
            self.i += 1
            return t
        return None

    def expect(self, kind: str, what: str, text: Optional[str] = None) -> Token:
        t = self.accept(kind, text)
        if t is None:
            self.error(f"expected {what}")
        return t

    def at_keyword(self, word: str) -> bool:
        return self.tok.kind == "name" and self.tok.text == word

    # names and terms
    def resolve(self, tok: Token) -> URI:
        text = tok.text
        if tok.kind == "iri":
            return URI(text[1:-1])
        if ":" in text:
            pfx, local = text.split(":", 1)
            if pfx not in self.prefixes:
                self.error(f"undeclared prefix {pfx!r}", tok)
            return URI(self.prefixes[pfx] + local)
        if "" not in self.prefixes:
            self.error("unprefixed name without a default '@prefix :' declaration", tok)
        return URI(self.prefixes[""] + text)

    def name(self, what="a name") -> URI:
        t = self.tok
        if t.kind in ("name", "iri"):
            self.i += 1
            return self.resolve(t)
        self.error(f"expected {what}")

    def term(self) -> Term:
        t = self.tok
        if t.kind == "var":
            self.i += 1
            return Variable(t.text[1:])
        if t.kind == "string":
            self.i += 1
            lex = _unescape(t.text[1:-1])
            lang = self.accept("lang")
            if lang:
                return PlainLiteral(lex, lang.text[1:].lower())
            if self.accept("dtype"):
                return TypedLiteral(lex, self.name("a datatype name").iri)
            return PlainLiteral(lex)
        if t.kind in ("name", "iri"):
            return self.name()
        self.error("expected a term (URI, literal or ?variable)")

    def triple_body(self, positive: bool) -> SignedTriple:
        t = self.tok
        if t.kind in ("string", "var"):
            self.error("literal as predicate")
        p = self.name("a predicate name")
        self.expect("(", "'('")
        s = self.term()
        self.expect(",", "','")
        o = self.term()
        self.expect(")", "')'")
        return SignedTriple(positive, p, s, o)

    def signed_triple(self) -> SignedTriple:
        positive = self.accept("-") is None
        return self.triple_body(positive)

    # formulas
    def formula(self) -> Formula:
        left = self.disjunction()
        if self.accept("implies"):
            return Implies(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.accept("|"):
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.accept("&") or self.accept(","):
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        if self.accept("~"):
            return WeakNeg(self.unary())
        if self.accept("-"):
            return StrongNeg(self.unary())
        for word, cls in (("exists", Exists), ("forall", Forall)):
            if self.at_keyword(word):
                self.i += 1
                vs = []
                while self.tok.kind == "var":
                    vs.append(Variable(self.tok.text[1:]))
                    self.i += 1
                if not vs:
                    self.error(f"expected a ?variable after '{word}'")
                body = self.formula()
                for v in reversed(vs):
                    body = cls(v, body)
                return body
        return self.primary()

    def primary(self) -> Formula:
        if self.accept("("):
            f = self.formula()
            self.expect(")", "')'")
            return f
        if self.at_keyword("true"):
            self.i += 1
            return TRUE
        if self.at_keyword("false"):
            self.i += 1
            return FALSE
        if self.tok.kind in ("name", "iri", "string", "var"):
            t = self.triple_body(True)
            return Atom(t.predicate, t.subject, t.object)
        self.error("expected a formula")

    def checked_formula(self) -> Formula:
        start = self.tok
        f = self.formula()
        problem = variable_discipline_violation(f)
        if problem:
            self.error(problem, start)
        return f

    # documents
    def prefix_decl(self):
        t = self.expect("name", "a prefix such as 'ex:'")
        if not t.text.endswith(":"):
            self.error("prefix name must end with ':'", t)
        iri = self.expect("iri", "an <IRI>")
        self.expect(".", "'.'")
        self.prefixes[t.text[:-1]] = iri.text[1:-1]

    def rule(self) -> Rule:
        start = self.tok
        if self.at_keyword("false"):
            self.i += 1
            concl: Union[SignedTriple, FalseConst] = FALSE
        else:
            concl = self.signed_triple()
        self.expect("arrow", "'<-'")
        if self.at_keyword("true") and self.toks[self.i + 1].kind == ".":
            self.i += 1
            cond: Formula = TRUE
        else:
            cond = self.checked_formula()
        r = Rule(concl, cond)
        if r.clash():
            self.error("bound/free clash", start)
        self.expect(".", "'.' after rule")
        return r

    def ontology(self) -> Ontology:
        graph: List[SignedTriple] = []
        rules: List[Rule] = []
        while self.tok.kind != "eof":
            if self.accept("prefixkw"):
                self.prefix_decl()
            elif self.at_keyword("graph"):
                self.i += 1
                self.expect("{", "'{'")
                while not self.accept("}"):
                    graph.append(self.signed_triple())
                    self.expect(".", "'.' after triple")
            elif self.at_keyword("rules"):
                self.i += 1
                self.expect("{", "'{'")
                while not self.accept("}"):
                    rules.append(self.rule())
            else:
                self.error("expected '@prefix', 'graph' or 'rules'")
        declared = {k: v for k, v in self.prefixes.items() if STANDARD_PREFIXES.get(k) != v}
        return Ontology(frozenset(graph), tuple(rules), declared)


def parse_ontology(text: str, cfg=None) -> Ontology:
    """Parse a ``.erdf`` document into an Ontology.

    ``cfg`` is accepted for interface symmetry; parsing does not depend on
    the vocabulary profile.
    """
    return _Parser(text, STANDARD_PREFIXES).ontology()


def parse_formula(text: str, prefixes: Optional[Dict[str, str]] = None) -> Formula:
    """Parse a query formula.

    Without explicit ``prefixes`` the standard prefixes are used and bare
    names resolve against ``http://example.org/``.
    """
    if prefixes is None:
        prefixes = {**STANDARD_PREFIXES, "": DEFAULT_NAMESPACE}
    else:
        prefixes = {**STANDARD_PREFIXES, **prefixes}
    p = _Parser(text, prefixes)
    f = p.checked_formula()
    if p.tok.kind != "eof":
        p.error("unexpected input after formula")
    return f


# --- serialization ------------------------------------------------------------

_LOCAL_RE = re.compile(r"[A-Za-z0-9_]*\Z")
_BARE_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class _Writer:
    def __init__(self, prefixes: Dict[str, str]):
        ps = {**STANDARD_PREFIXES, **prefixes}
        # longest namespace first so the most specific prefix wins
        self.prefixes = sorted(ps.items(), key=lambda kv: (-len(kv[1]), kv[0]))

    def uri(self, u: URI) -> str:
        for pfx, ns in self.prefixes:
            if u.iri.startswith(ns):
                local = u.iri[len(ns):]
                if pfx == "" and _BARE_RE.match(local) and local not in KEYWORDS:
                    return local
                if _LOCAL_RE.match(local):
                    return f"{pfx}:{local}"
        return f"<{u.iri}>"

    def term(self, t: Term) -> str:
        if isinstance(t, URI):
            return self.uri(t)
        if isinstance(t, Variable):
            return f"?{t.name}"
        lex = t.lexical.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") \
            .replace("\t", "\\t").replace("\r", "\\r")
        if isinstance(t, PlainLiteral):
            return f'"{lex}"' + (f"@{t.lang}" if t.lang else "")
        return f'"{lex}"^^{self.uri(URI(t.datatype))}'

    def triple(self, t: SignedTriple) -> str:
        sign = "" if t.positive else "-"
        return f"{sign}{self.uri(t.predicate)}({self.term(t.subject)}, {self.term(t.object)})"

    def formula(self, f: Formula) -> str:
        if isinstance(f, Atom):
            return f"{self.uri(f.predicate)}({self.term(f.subject)}, {self.term(f.object)})"
        if isinstance(f, TrueConst):
            return "true"
        if isinstance(f, FalseConst):
            return "false"
        if isinstance(f, StrongNeg):
            return "-" + self._unary(f.body)
        if isinstance(f, WeakNeg):
            return "~" + self._unary(f.body)
        if isinstance(f, (And, Or, Implies)):
            op = {And: "&", Or: "|", Implies: "=>"}[type(f)]
            return f"({self.formula(f.left)} {op} {self.formula(f.right)})"
        word = "exists" if isinstance(f, Exists) else "forall"
        return f"({word} ?{f.var.name} {self.formula(f.body)})"

    def _unary(self, f: Formula) -> str:
        s = self.formula(f)
        return s if isinstance(f, (Atom, TrueConst, FalseConst, StrongNeg, WeakNeg)) or s.startswith("(") \
            else f"({s})"

    def rule(self, r: Rule) -> str:
        head = "false" if r.is_constraint else self.triple(r.conclusion)
        return f"{head} <- {self.formula(r.condition)}."

    def ontology(self, o: Ontology) -> str:
        lines = [f"@prefix {p}: <{ns}> ." for p, ns in sorted(o.prefixes.items())]
        lines.append("graph {")
        lines += [f"  {self.triple(t)}." for t in canonical_triples(o.graph)]
        lines.append("}")
        lines.append("rules {")
        lines += [f"  {self.rule(r)}" for r in o.program]
        lines.append("}")
        return "\n".join(lines) + "\n"


def serialize(x, prefixes: Optional[Dict[str, str]] = None) -> str:
    """Render an Ontology, Rule, SignedTriple or Formula as ``.erdf`` text."""
    if isinstance(x, Ontology):
        return _Writer({**x.prefixes, **(prefixes or {})}).ontology(x)
    w = _Writer(prefixes or {})
    if isinstance(x, Rule):
        return w.rule(x)
    if isinstance(x, SignedTriple):
        return w.triple(x)
    return w.formula(x)
