from __future__ import annotations

import re
from dataclasses import replace
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import rhs_text
from typedpg.backend.emitter import emit_antlr_grammar, emit_external_interface, emit_files
from typedpg.backend.naming import RESERVED
from typedpg.demo import SIMPLE_GTS_PATH
from typedpg.frontend import format_rule, parse_specification
from typedpg.grammar import Alt, Iter, Labeled, Opt, Seq
from typedpg.pipeline import analyze, declarative_extension, load_type_system_file

GOLDEN = Path(__file__).parent / "golden"

ATOMS = ("B", "C", "'x'", "'+'")


@pytest.fixture()
def arith_files(checked_arith, java_profile):
    return emit_files(checked_arith, java_profile)


def test_grammar_matches_golden(arith_files):
    assert arith_files["ExpressionEvaluator.g"] == (GOLDEN / "ExpressionEvaluator.g").read_text()


def test_interface_matches_golden(arith_files):
    text = arith_files["ExpressionEvaluatorExternals.java"]
    assert text == (GOLDEN / "ExpressionEvaluatorExternals.java").read_text()


def test_rule_header(arith_files):
    assert "expr[java.util.Map<String, Integer> env] returns [int result]" in arith_files["ExpressionEvaluator.g"]


def test_package_and_parser_name(arith_files):
    g = arith_files["ExpressionEvaluator.g"]
    assert g.startswith("grammar ExpressionEvaluator;")
    assert "package org.example.arithexp;" in g


def test_seven_externals(arith_files):
    methods = re.findall(r"^    \S.*\);$", arith_files["ExpressionEvaluatorExternals.java"], re.M)
    assert len(methods) == 7
    assert "    int value(java.util.Map<String, Integer> env, String variable);" in methods


def test_default_profile_name(checked_arith):
    assert set(emit_files(checked_arith)) == {"Translator.g", "TranslatorExternals.java"}


def test_reserved_attribute_is_renamed(simple_ext):
    text = "a : B ; a() --> (Int int) { after B : int = f(); } B : 'b' ;"
    checked = analyze(text, simple_ext)
    assert checked.ok
    g = emit_antlr_grammar(checked)
    assert "returns [int int1]" in g and "$int1 = tpg_externals.f();" in g


def test_grammar_without_functions_has_no_actions(simple_ext):
    checked = analyze("a : B (C | 'x')* ; B : 'b' ; C : 'c' ;", simple_ext)
    g = emit_antlr_grammar(checked)
    rules = [line for line in g.splitlines() if not line.startswith("TPG_WS")]
    assert not any("{" in line or "[" in line or "$" in line for line in rules)
    assert "@members" not in g


def test_empty_interface():
    text = emit_external_interface([])
    assert text == "public interface TranslatorExternals {\n}\n"


def test_inferred_external_is_marked(simple_ext):
    checked = analyze("a : B ; a(Int b, Int c) --> (Int x) { after B : x = f(b, c); } B : 'b' ;", simple_ext)
    java = emit_files(checked)["TranslatorExternals.java"]
    # inferred parameters are named by position
    assert "    // inferred\n    int f(int arg1, int arg2);" in java


def test_multiple_outputs_use_carrier(simple_ext):
    text = "divide(Int x, Int y) --> (Int q, Int r); a : B ; a(Int x) --> (Int q, Int r) { after B : (q, r) = divide(x, x); } B : 'b' ;"
    checked = analyze(text, simple_ext)
    files = emit_files(checked)
    assert "DivideResult divide(int x, int y);" in files["TranslatorExternals.java"]
    assert "final class DivideResult" in files["TranslatorExternals.java"]
    assert ".field1;" in files["Translator.g"] and ".field2;" in files["Translator.g"]


def test_emission_is_deterministic(checked_arith, java_profile):
    assert emit_files(checked_arith, java_profile) == emit_files(checked_arith, java_profile)


def test_failing_spec_is_refused(arith_variant):
    with pytest.raises(ValueError):
        emit_antlr_grammar(arith_variant("result = INT#"))


IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def _strip_strings(text):
    return re.sub(r"'(?:[^'\\]|\\.)*'|\"(?:[^\"\\]|\\.)*\"", "''", text)


def test_no_reserved_identifier_is_declared(arith_files):
    g = _strip_strings(arith_files["ExpressionEvaluator.g"])
    # names the user controls: parameters, results, locals, labels and rule names
    declared = re.findall(r"\[(?:[\w.<>, ]+ )?(\w+)\]", g) + re.findall(r"^(\w+)\[", g, re.M)
    declared += re.findall(r"^\s+\w+ (\w+) = ", g, re.M)
    assert declared and not (set(declared) & RESERVED)


# -- grammar-only round trip -----------------------------------------------------------


def _remove_braced(text):
    out, depth = [], 0
    for ch in text:
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        elif depth == 0:
            out.append(ch)
    return "".join(out)


def strip_decoration(g):
    """Reduce an emitted grammar to plain rules the front end can parse."""
    g = re.sub(r"^//.*$", "", g, flags=re.M)
    g = re.sub(r"^grammar \w+;", "", g, flags=re.M)
    g = re.sub(r"^TPG_WS .*$", "", g, flags=re.M)
    g = re.sub(r"@(?:lexer::)?(?:header|members|init)", "", g)
    g = _remove_braced(g)
    g = re.sub(r"returns \[[^\]]*\]", "", g)
    g = re.sub(r"(\w)\[[^\]]*\]", r"\1", g)
    return re.sub(r"\btpg_\w+=", "", g)


def _normalize(node):
    # Labels are not emitted and grouping of nested sequences is not kept.
    if isinstance(node, Labeled):
        return _normalize(node.child)
    if isinstance(node, (Seq, Alt)):
        kids = []
        for c in map(_normalize, node.children):
            kids.extend(c.children if type(c) is type(node) else [c])
        return type(node)(tuple(kids))
    if isinstance(node, Iter):
        return Iter(_normalize(node.child), node.min)
    if isinstance(node, Opt):
        return Opt(_normalize(node.child))
    return node


def _rules(spec):
    return sorted(format_rule(replace(r, rhs=_normalize(r.rhs))) for r in spec.grammar.rules)


def test_round_trip_of_arith(checked_arith, arith_files):
    back = parse_specification(strip_decoration(arith_files["ExpressionEvaluator.g"]))
    assert _rules(back) == _rules(checked_arith.spec)


@settings(max_examples=100, deadline=None)
@given(rhs_text(ATOMS), st.booleans())
def test_round_trip_of_generated_grammars(body, with_function):
    simple_ext, _ = declarative_extension(load_type_system_file(SIMPLE_GTS_PATH))
    tf = "a() --> (Int n) { after B : n = f(); before C : n = g(); }" if with_function else ""
    text = f"a : B {body} C ; {tf} B : 'b' ; C : 'c' ;"
    checked = analyze(text, simple_ext)
    assert checked.ok, checked.diagnostics
    back = parse_specification(strip_decoration(emit_antlr_grammar(checked)))
    assert _rules(back) == _rules(checked.spec)
