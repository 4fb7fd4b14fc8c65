import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from erdf.model import (TRUE, And, Atom, Exists, Forall, Implies, Ontology, Or, Rule, SignedTriple, StrongNeg, WeakNeg,
                        variable_discipline_violation)
from erdf.syntax import ParseError, parse_formula, parse_ontology, serialize, tokenize
from erdf.terms import PlainLiteral, TypedLiteral, URI, Variable
from erdf.vocab import TYPE

from helpers import PREDS, X, Y, ex, formulas, graphs, load

PFX = {"": "http://example.org/"}


def test_atom_and_prefixes():
    f = parse_formula("rdf:type(?x, Wine)")
    assert f == Atom(TYPE, Variable("x"), ex("Wine"))


def test_precedence():
    # & binds tighter than |, which binds tighter than =>
    f = parse_formula("p(a,b) | q(a,b) & p(b,a) => q(b,b)")
    assert isinstance(f, Implies)
    assert isinstance(f.left, Or) and isinstance(f.left.right, And)


def test_implication_is_right_associative():
    f = parse_formula("p(a,a) => p(b,b) => p(c,c)")
    assert isinstance(f.right, Implies)


def test_comma_is_conjunction():
    assert parse_formula("p(a,b), q(a,b)") == parse_formula("p(a,b) & q(a,b)")


def test_negations_and_quantifiers():
    f = parse_formula("forall ?x ?y ~-p(?x, ?y)")
    assert isinstance(f, Forall) and isinstance(f.body, Forall)
    assert isinstance(f.body.body, WeakNeg) and isinstance(f.body.body.body, StrongNeg)


def test_quantifier_scope_extends_right():
    f = parse_formula("exists ?x p(?x, a) & q(?x, b)")
    assert isinstance(f, Exists) and isinstance(f.body, And)


def test_literals():
    f = parse_formula('p(a, "hi"@en) & q(a, "1"^^xsd:integer)')
    assert f.left.object == PlainLiteral("hi", "en")
    assert f.right.object == TypedLiteral("1", "http://www.w3.org/2001/XMLSchema#integer")


def test_full_iri():
    f = parse_formula("<http://x.org/p>(<http://x.org/s>, a)")
    assert f.predicate == URI("http://x.org/p")


def test_ontology_sections():
    o = load("wine")
    assert len(o.graph) == 9 and len(o.program) == 2
    assert o.prefixes == {"": "http://example.org/wine#"}


def test_constraint_and_true_rules():
    o = parse_ontology("@prefix : <http://e/> . rules { false <- p(a, b). q(a, b) <- true. }")
    assert o.program[0].is_constraint
    assert o.program[1].condition == TRUE


@pytest.mark.parametrize("text, fragment", [
    ("p(?x", "expected"),
    ("?x(a, b)", "predicate"),
    ('"lit"(a, b)', "predicate"),
    ("foo:p(a, b)", "prefix"),
    ("p(a, b) &", "expected"),
    ("exists ?x p(?x, a) & exists ?x q(?x, a)", "bound more than once"),
    ("p(?x, a) & exists ?x q(?x, a)", "free and bound"),
    ("p(a, b) $", "unexpected character"),
])
def test_formula_errors(text, fragment):
    with pytest.raises(ParseError) as e:
        parse_formula(text)
    assert fragment in str(e.value)


def test_error_position():
    with pytest.raises(ParseError) as e:
        parse_ontology("@prefix : <http://e/> .\ngraph {\n  p(a b).\n}")
    assert (e.value.line, e.value.column) == (3, 7)


def test_unprefixed_name_needs_default_prefix():
    with pytest.raises(ParseError):
        parse_ontology("graph { p(a, b). }")


def test_rule_conclusion_var_bound_in_condition():
    with pytest.raises(ParseError):
        parse_ontology("@prefix : <http://e/> . rules { p(?x, a) <- exists ?x q(?x, a). }")


def test_graph_blank_nodes_allowed():
    o = parse_ontology("@prefix : <http://e/> . graph { p(?x, a). -q(?x, ?y). }")
    assert {t.positive for t in o.graph} == {True, False}


def test_tokens_track_lines():
    toks = tokenize("a\n  b")
    assert [(t.line, t.col) for t in toks[:2]] == [(1, 1), (2, 3)]


# --- round trip ------------------------------------------------------------------------

@pytest.mark.parametrize("name", ["wine", "assignment", "eu", "answers_total", "empty"])
def test_ontology_round_trip(name):
    o = load(name)
    assert parse_ontology(serialize(o)) == o


@settings(max_examples=200, deadline=None)
@given(formulas)
def test_formula_round_trip(f):
    assume(variable_discipline_violation(f) is None)
    text = serialize(f, PFX)
    assert parse_formula(text, PFX) == f


@settings(max_examples=100, deadline=None)
@given(graphs(), st.lists(formulas, max_size=2))
def test_ontology_round_trip_random(g, conds):
    rules = tuple(Rule(SignedTriple(True, PREDS[0], X, Y), c) for c in conds)
    o = Ontology(g, rules, dict(PFX))
    try:
        back = parse_ontology(serialize(o))
    except ParseError as e:
        # random conditions may break variable discipline; those must be rejected, not garbled
        assert "bound" in e.message or "clash" in e.message
        return
    assert back == o


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet="pq(?x,a)&|~-=>.{} \n\"@:<>", max_size=40))
def test_parser_fuzz_only_raises_parse_errors(text):
    try:
        parse_formula(text)
    except ParseError:
        pass
    try:
        parse_ontology(text)
    except ParseError:
        pass
