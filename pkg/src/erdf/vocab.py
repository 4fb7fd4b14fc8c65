"""Built-in RDF, RDFS and ERDF vocabularies, axiomatic triples, XML literals."""
from __future__ import annotations

import enum
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import FrozenSet, Optional, Set, Tuple

from .terms import URI, XmlValue

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"
# Namespace of the two ERDF meta-classes; fixed by the .erdf format.
ERDF_NS = "http://erdf.org/ns/erdf#"

STANDARD_PREFIXES = {
    "rdf": RDF_NS,
    "rdfs": RDFS_NS,
    "xsd": XSD_NS,
    "erdf": ERDF_NS,
}


def rdf(local: str) -> URI:
    return URI(RDF_NS + local)


def rdfs(local: str) -> URI:
    return URI(RDFS_NS + local)


def erdf(local: str) -> URI:
    return URI(ERDF_NS + local)


# frequently used names
TYPE = rdf("type")
PROPERTY = rdf("Property")
XML_LITERAL = rdf("XMLLiteral")
RESOURCE = rdfs("Resource")
LITERAL = rdfs("Literal")
CLASS = rdfs("Class")
DATATYPE = rdfs("Datatype")
DOMAIN = rdfs("domain")
RANGE = rdfs("range")
SUBCLASS = rdfs("subClassOf")
SUBPROPERTY = rdfs("subPropertyOf")
MEMBER = rdfs("member")
CMP = rdfs("ContainerMembershipProperty")
TOTAL_CLASS = erdf("TotalClass")
TOTAL_PROPERTY = erdf("TotalProperty")

XML_LITERAL_IRI = XML_LITERAL.iri

_RDF_CORE = ["type", "Property", "XMLLiteral"]
_RDF_EXTRA = ["nil", "List", "Statement", "subject", "predicate", "object",
              "first", "rest", "Seq", "Bag", "Alt", "value"]
_RDFS_CORE = ["domain", "range", "Resource", "Literal", "Datatype", "Class",
              "subClassOf", "subPropertyOf"]
_RDFS_EXTRA = ["member", "Container", "ContainerMembershipProperty", "comment",
               "seeAlso", "isDefinedBy", "label"]


class Profile(str, enum.Enum):
    FULL = "full"
    COMPACT = "compact"


@dataclass(frozen=True)
class VocabularyConfig:
    """How much of the built-in vocabulary is materialized.

    ``container_index_bound`` truncates the infinite rdf:_1, rdf:_2, ...
    family. The compact profile drops container, list, statement and
    annotation vocabulary (and every axiom mentioning it) and forces the
    bound to 0.
    """

    container_index_bound: int = 1
    profile: Profile = Profile.FULL

    def __post_init__(self):
        object.__setattr__(self, "profile", Profile(self.profile))
        if self.container_index_bound < 0:
            raise ValueError("container_index_bound must be >= 0")
        if self.profile is Profile.COMPACT:
            object.__setattr__(self, "container_index_bound", 0)

    @property
    def bound(self) -> int:
        return self.container_index_bound


DEFAULT_CONFIG = VocabularyConfig()


def container_property(i: int) -> URI:
    return rdf(f"_{i}")


def rdf_vocabulary(cfg: VocabularyConfig = DEFAULT_CONFIG) -> Set[URI]:
    names = list(_RDF_CORE)
    if cfg.profile is Profile.FULL:
        names += _RDF_EXTRA
    out = {rdf(n) for n in names}
    out.update(container_property(i) for i in range(1, cfg.bound + 1))
    return out


def rdfs_vocabulary(cfg: VocabularyConfig = DEFAULT_CONFIG) -> Set[URI]:
    names = list(_RDFS_CORE)
    if cfg.profile is Profile.FULL:
        names += _RDFS_EXTRA
    return {rdfs(n) for n in names}


def erdf_vocabulary() -> Set[URI]:
    return {TOTAL_CLASS, TOTAL_PROPERTY}


def builtin_vocabulary(cfg: VocabularyConfig = DEFAULT_CONFIG) -> FrozenSet[URI]:
    return frozenset(rdf_vocabulary(cfg) | rdfs_vocabulary(cfg) | erdf_vocabulary())


# (predicate, subject, object) as local names with prefixes
_RDF_AXIOMS = [
    ("rdf:type", "rdf:type", "rdf:Property"),
    ("rdf:type", "rdf:subject", "rdf:Property"),
    ("rdf:type", "rdf:predicate", "rdf:Property"),
    ("rdf:type", "rdf:object", "rdf:Property"),
    ("rdf:type", "rdf:first", "rdf:Property"),
    ("rdf:type", "rdf:rest", "rdf:Property"),
    ("rdf:type", "rdf:value", "rdf:Property"),
    ("rdf:type", "rdf:nil", "rdf:List"),
]

_RDFS_AXIOMS = [
    ("rdfs:domain", "rdf:type", "rdfs:Resource"),
    ("rdfs:domain", "rdfs:domain", "rdf:Property"),
    ("rdfs:domain", "rdfs:range", "rdf:Property"),
    ("rdfs:domain", "rdfs:subPropertyOf", "rdf:Property"),
    ("rdfs:domain", "rdfs:subClassOf", "rdfs:Class"),
    ("rdfs:domain", "rdf:subject", "rdf:Statement"),
    ("rdfs:domain", "rdf:predicate", "rdf:Statement"),
    ("rdfs:domain", "rdf:object", "rdf:Statement"),
    ("rdfs:domain", "rdfs:member", "rdfs:Resource"),
    ("rdfs:domain", "rdf:first", "rdf:List"),
    ("rdfs:domain", "rdf:rest", "rdf:List"),
    ("rdfs:domain", "rdfs:seeAlso", "rdfs:Resource"),
    ("rdfs:domain", "rdfs:isDefinedBy", "rdfs:Resource"),
    ("rdfs:domain", "rdfs:comment", "rdfs:Resource"),
    ("rdfs:domain", "rdfs:label", "rdfs:Resource"),
    # rdfs:value is not an RDFS term; the triple is about rdf:value
    ("rdfs:domain", "rdf:value", "rdfs:Resource"),
    ("rdfs:range", "rdf:type", "rdfs:Class"),
    ("rdfs:range", "rdfs:domain", "rdfs:Class"),
    ("rdfs:range", "rdfs:range", "rdfs:Class"),
    ("rdfs:range", "rdfs:subPropertyOf", "rdf:Property"),
    ("rdfs:range", "rdfs:subClassOf", "rdfs:Class"),
    ("rdfs:range", "rdf:subject", "rdfs:Resource"),
    ("rdfs:range", "rdf:predicate", "rdfs:Resource"),
    ("rdfs:range", "rdf:object", "rdfs:Resource"),
    ("rdfs:range", "rdfs:member", "rdfs:Resource"),
    ("rdfs:range", "rdf:first", "rdfs:Resource"),
    ("rdfs:range", "rdf:rest", "rdf:List"),
    ("rdfs:range", "rdfs:seeAlso", "rdfs:Resource"),
    ("rdfs:range", "rdfs:isDefinedBy", "rdfs:Resource"),
    ("rdfs:range", "rdfs:comment", "rdfs:Literal"),
    ("rdfs:range", "rdfs:label", "rdfs:Literal"),
    ("rdfs:range", "rdf:value", "rdfs:Resource"),
    ("rdfs:subClassOf", "rdf:Alt", "rdfs:Container"),
    ("rdfs:subClassOf", "rdf:Bag", "rdfs:Container"),
    ("rdfs:subClassOf", "rdf:Seq", "rdfs:Container"),
    ("rdfs:subClassOf", "rdfs:ContainerMembershipProperty", "rdf:Property"),
    ("rdfs:subPropertyOf", "rdfs:isDefinedBy", "rdfs:seeAlso"),
    ("rdf:type", "rdf:XMLLiteral", "rdfs:Datatype"),
    ("rdfs:subClassOf", "rdf:XMLLiteral", "rdfs:Literal"),
    ("rdfs:subClassOf", "rdfs:Datatype", "rdfs:Class"),
]

# TotalProperty is declared a subclass of rdfs:Class, not of rdf:Property;
# the closure engine adds the latter.
_ERDF_AXIOMS = [
    ("rdfs:subClassOf", "erdf:TotalClass", "rdfs:Class"),
    ("rdfs:subClassOf", "erdf:TotalProperty", "rdfs:Class"),
]


def _expand(qname: str) -> URI:
    prefix, local = qname.split(":", 1)
    return URI(STANDARD_PREFIXES[prefix] + local)


def axiomatic_triples(cfg: VocabularyConfig = DEFAULT_CONFIG) -> Set[Tuple[URI, URI, URI]]:
    """Positive axiomatic triples as (predicate, subject, object)."""
    vocab = builtin_vocabulary(cfg)
    out = set()
    for row in _RDF_AXIOMS + _RDFS_AXIOMS + _ERDF_AXIOMS:
        t = tuple(_expand(x) for x in row)
        if all(x in vocab for x in t):
            out.add(t)
    for i in range(1, cfg.bound + 1):
        ci = container_property(i)
        out.add((TYPE, ci, PROPERTY))
        out.add((TYPE, ci, CMP))
        out.add((DOMAIN, ci, RESOURCE))
        out.add((RANGE, ci, RESOURCE))
    return out


def axiomatic_graph(cfg: VocabularyConfig = DEFAULT_CONFIG):
    """The axiomatic triples as a graph of positive signed triples."""
    from .model import SignedTriple

    return frozenset(SignedTriple(True, p, s, o) for p, s, o in axiomatic_triples(cfg))


_WRAP = "erdf-wrapper"


def classify_xml_literal(lexical: str) -> Optional[XmlValue]:
    """Return the XML value of a well-typed XML literal, else ``None``.

    Well-typed means the string is either plain character data or a single
    well-formed element (surrounding whitespace allowed). The canonical form
    is the C14N serialization, which normalizes whitespace inside tags.
    """
    wrapped = f"<{_WRAP}>{lexical}</{_WRAP}>"
    try:
        root = ET.fromstring(wrapped)
    except ET.ParseError:
        return None
    children = list(root)
    if len(children) > 1:
        return None
    if children:
        outside = (root.text or "") + (children[0].tail or "")
        if outside.strip():
            return None
    canon = ET.canonicalize(xml_data=wrapped)
    inner = canon[len(_WRAP) + 2: -(len(_WRAP) + 3)]
    return XmlValue(inner)
