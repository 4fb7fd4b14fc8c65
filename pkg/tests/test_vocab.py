import pytest

from erdf.terms import XmlValue
from erdf.vocab import (CMP, DOMAIN, RESOURCE, SUBCLASS, TOTAL_CLASS, TOTAL_PROPERTY, TYPE, Profile,
                        VocabularyConfig, axiomatic_triples, builtin_vocabulary, classify_xml_literal,
                        container_property, rdf, rdfs)


def test_config_validation():
    with pytest.raises(ValueError):
        VocabularyConfig(container_index_bound=-1)
    assert VocabularyConfig(container_index_bound=5, profile="compact").bound == 0
    assert VocabularyConfig(profile="compact").profile is Profile.COMPACT


def test_full_vocabulary():
    v = builtin_vocabulary(VocabularyConfig(1))
    assert {TYPE, SUBCLASS, TOTAL_PROPERTY, rdf("_1")} <= v


def test_bound_zero_has_no_container_properties():
    v = builtin_vocabulary(VocabularyConfig(0))
    assert not any(u.iri.startswith(rdf("_").iri) for u in v)


def test_compact_profile():
    v = builtin_vocabulary(VocabularyConfig(profile="compact"))
    assert rdfs("member") not in v and DOMAIN in v


@pytest.mark.parametrize("n", [0, 1, 3])
def test_container_axioms_scale(n):
    ax = axiomatic_triples(VocabularyConfig(n))
    props = {container_property(i) for i in range(1, n + 1)}
    mentioning = [t for t in ax if props & set(t)]
    assert len(props) == n and len(mentioning) == 4 * n


def test_axiom_examples():
    assert (TYPE, rdf("nil"), rdf("List")) in axiomatic_triples(VocabularyConfig(0))
    assert (SUBCLASS, TOTAL_PROPERTY, rdfs("Class")) in axiomatic_triples(VocabularyConfig(0))
    assert (SUBCLASS, TOTAL_CLASS, rdfs("Class")) in axiomatic_triples(VocabularyConfig(0))
    assert (DOMAIN, rdf("_2"), RESOURCE) in axiomatic_triples(VocabularyConfig(2))
    assert (TYPE, rdf("_2"), CMP) in axiomatic_triples(VocabularyConfig(2))


def test_axioms_stay_inside_vocabulary():
    for cfg in (VocabularyConfig(2), VocabularyConfig(profile="compact")):
        v = builtin_vocabulary(cfg)
        assert all(x in v for t in axiomatic_triples(cfg) for x in t)


def test_value_axiom_uses_rdf_namespace():
    assert (DOMAIN, rdf("value"), RESOURCE) in axiomatic_triples()
    assert not any(rdfs("value") in t for t in axiomatic_triples())


def test_xml_literals():
    assert classify_xml_literal("<a>x</a>") == XmlValue("<a>x</a>")
    assert classify_xml_literal("<a>x") is None
    assert classify_xml_literal("<a >x</a>") == classify_xml_literal("<a>x</a>")
    assert classify_xml_literal("plain text") == XmlValue("plain text")
    assert classify_xml_literal("<a/><b/>") is None


def test_xml_value_is_its_own_kind():
    from erdf.terms import URI, PlainLiteral
    x = XmlValue("a")
    assert x != URI("a") and x != PlainLiteral("a")
