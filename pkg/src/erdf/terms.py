"""Term kinds shared by every layer: URIs, literals, variables and XML values.

Terms are plain tuples with a trailing kind tag so that hashing and equality
stay cheap (the closure engine builds hundreds of thousands of triples) and so
that a URI can never compare equal to a literal or a variable with the same
spelling.
"""
from __future__ import annotations

from typing import NamedTuple, Optional, Tuple, Union


class URI(NamedTuple):
    iri: str
    kind: str = "uri"

    def __repr__(self) -> str:
        return f"<{self.iri}>"


class PlainLiteral(NamedTuple):
    lexical: str
    lang: Optional[str] = None
    kind: str = "plain"

    def __repr__(self) -> str:
        return f'"{self.lexical}"' + (f"@{self.lang}" if self.lang else "")


class TypedLiteral(NamedTuple):
    lexical: str
    datatype: str
    kind: str = "typed"

    def __repr__(self) -> str:
        return f'"{self.lexical}"^^<{self.datatype}>'


class Variable(NamedTuple):
    name: str
    kind: str = "var"

    def __repr__(self) -> str:
        return f"?{self.name}"


class XmlValue(NamedTuple):
    """The value denoted by a well-typed XML literal.

    Lives only in Herbrand universes; it never appears in source text.
    """

    canonical: str
    kind: str = "xmlvalue"

    def __repr__(self) -> str:
        return f"xml<{self.canonical}>"


Literal = Union[PlainLiteral, TypedLiteral]
Term = Union[URI, PlainLiteral, TypedLiteral, Variable]
Resource = Union[URI, PlainLiteral, TypedLiteral, XmlValue]

# (predicate, subject, object) over resources
Triple = Tuple[Resource, Resource, Resource]
# (positive?, predicate, subject, object)
Atom = Tuple[bool, Resource, Resource, Resource]

_KIND_RANK = {"uri": 0, "plain": 1, "typed": 1, "xmlvalue": 2, "var": 3}


def is_literal(t) -> bool:
    return t.kind == "plain" or t.kind == "typed"


def is_var(t) -> bool:
    return t.kind == "var"


def term_key(t) -> tuple:
    """Canonical ordering: URIs lexicographically, then literals, then XML values."""
    if t.kind == "uri":
        return (0, t.iri, "", "")
    if t.kind == "plain":
        return (1, t.lexical, "", t.lang or "")
    if t.kind == "typed":
        return (1, t.lexical, t.datatype, "")
    return (_KIND_RANK[t.kind], t[0], "", "")


def triple_key(t) -> tuple:
    return (term_key(t[0]), term_key(t[1]), term_key(t[2]))


def atom_key(a) -> tuple:
    return (not a[0],) + triple_key(a[1:])
