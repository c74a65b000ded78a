from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from typedpg.diagnostics import E_CHAR_RANGE, E_DUPLICATE, E_FRAGMENT, E_LABEL_DUP, E_UNDEFINED
from typedpg.frontend import parse_specification
from typedpg.grammar import (
    Alt,
    GrammarModel,
    Labeled,
    Occurrence,
    Rule,
    Seq,
    Site,
    SymRef,
    Symbol,
    UnknownSiteError,
    node_at,
    resolve_action_site,
    validate_grammar,
    walk,
)

LISTING_GRAMMAR = """
expr : term (('+' | '-') term)* ;
term : factor ('*' factor)* ;
factor : VAR | INT | '(' expr ')' ;
fragment LETTER : 'a'..'z' | 'A'..'Z' | '_' ;
fragment DIGIT : '0'..'9' ;
VAR : LETTER (LETTER | DIGIT)* ;
INT : DIGIT+ ;
"""


def grammar_of(text):
    return parse_specification(text).grammar


def codes(diags):
    return [d.code for d in diags]


def test_symbol_kind_follows_case():
    assert Symbol.ref("VAR").is_token
    assert Symbol.ref("expr").is_nonterminal
    assert Symbol.literal("+").is_literal and Symbol.literal("+").is_token


def test_listing_grammar_is_valid():
    assert validate_grammar(grammar_of(LISTING_GRAMMAR)) == []


def test_term_sites(arith_text):
    term = parse_specification(arith_text).grammar.rule("term")
    both = resolve_action_site(term, "factor")
    assert len(both) == 2
    assert {o.path for o in both} == {p for p, n in walk(term.rhs) if isinstance(n, SymRef) and n.symbol.name == "factor"}
    only = resolve_action_site(term, "$f1")
    assert len(only) == 1
    assert isinstance(node_at(term.rhs, only[0].path), Labeled)


def test_unknown_site():
    expr = grammar_of(LISTING_GRAMMAR).rule("expr")
    with pytest.raises(UnknownSiteError):
        resolve_action_site(expr, "zzz")


def test_literal_site_matches_only_literals():
    rule = grammar_of("a : b '-' b ; b : 'b' ;").rule("a")
    assert len(resolve_action_site(rule, Site("literal", "-"))) == 1
    with pytest.raises(UnknownSiteError):
        resolve_action_site(rule, Site("symbol", "-"))


def test_undefined_symbol():
    diags = validate_grammar(grammar_of("a : b ;"))
    assert codes(diags) == [E_UNDEFINED]
    assert "b" in diags[0].message


def test_duplicate_label():
    diags = validate_grammar(grammar_of("a : $x=B $x=B ; B : 'b' ;"))
    assert codes(diags) == [E_LABEL_DUP]


def test_duplicate_rule_and_char_range_outside_tokens():
    diags = validate_grammar(grammar_of("a : 'x' ; a : 'y' ; c : 'a'..'z' ;"))
    assert sorted(codes(diags)) == sorted([E_DUPLICATE, E_CHAR_RANGE])


def test_fragment_use_in_syntactic_rule():
    diags = validate_grammar(grammar_of("a : D ; fragment D : '0'..'9' ;"))
    assert codes(diags) == [E_FRAGMENT]


def test_recursive_token_rule_rejected():
    diags = validate_grammar(grammar_of("A : 'a' A? ;"))
    assert codes(diags) == [E_UNDEFINED]
    assert "recursive" in diags[0].message


# -- properties ---------------------------------------------------------------

NAMES = st.sampled_from(["a", "b", "c", "X", "Y"])


@st.composite
def rhs_trees(draw, depth=3):
    if depth == 0 or draw(st.booleans()):
        return SymRef(Symbol.ref(draw(NAMES)))
    kind = draw(st.sampled_from(["seq", "alt", "label"]))
    if kind == "label":
        return Labeled(f"l{draw(st.integers(0, 1000))}", draw(rhs_trees(depth=depth - 1)))
    kids = tuple(draw(st.lists(rhs_trees(depth=depth - 1), min_size=2, max_size=3)))
    return Seq(kids) if kind == "seq" else Alt(kids)


@settings(max_examples=150, deadline=None)
@given(rhs_trees(), NAMES)
def test_symbol_site_counts_occurrences(tree, name):
    rule = Rule("r", tree)
    expected = sum(1 for _, n in walk(tree) if isinstance(n, SymRef) and n.symbol.name == name)
    if expected == 0:
        with pytest.raises(UnknownSiteError):
            resolve_action_site(rule, name)
    else:
        assert len(resolve_action_site(rule, name)) == expected


@settings(max_examples=150, deadline=None)
@given(rhs_trees())
def test_each_label_resolves_to_one_occurrence(tree):
    rule = Rule("r", tree)
    labels = [n.label for _, n in walk(tree) if isinstance(n, Labeled)]
    for label in set(labels):
        if labels.count(label) == 1:
            found = resolve_action_site(rule, "$" + label)
            assert found == [Occurrence("r", rule.labels()[label], "$" + label)]


@settings(max_examples=100, deadline=None)
@given(rhs_trees())
def test_validation_is_repeatable(tree):
    model = GrammarModel((Rule("r", tree), Rule("a", SymRef(Symbol.literal("a")))))
    assert validate_grammar(model) == validate_grammar(model)
