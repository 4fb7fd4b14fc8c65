"""Extended RDF: partial (three-valued) RDF interpretations with total
properties and classes, derivation rules with weak and strong negation,
and a stable-model semantics for the resulting ontologies."""

from .interp import (HerbrandInterpretation, Incoherent, Violation, check_conditions, close, leq,
                     satisfies, satisfies_graph, satisfies_ontology, satisfies_rule)
from .model import (Atom, GroundingLimitError, LimitError, Ontology, Rule, SignedTriple, ground_program,
                    herbrand_universe, normalize_negation, skolemize, vocabulary_of)
from .stable import (AnswerSet, ModelFamily, SearchLimits, Verdict, chain_verify, credulous_answers,
                     entails, herbrand_models_bruteforce, minimal_graph_models, solve, stable_answers,
                     stable_models)
from .syntax import ParseError, parse_formula, parse_ontology, serialize
from .vocab import Profile, VocabularyConfig

__version__ = "0.1.0"
