from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from typedpg.backend.interpreter import (
    HostError,
    LexError,
    ParseError,
    RuntimeValue,
    TypeTagError,
    UnboundExternalError,
    interpret,
    tokenize_input,
)
from typedpg.demo import ARITH_CALLBACKS, ARITH_SPEC_PATH, SIMPLE_GTS_PATH
from typedpg.pipeline import analyze, analyze_files
from typedpg.typesystem import GroundType


@pytest.fixture(scope="module")
def arith():
    checked, _ = analyze_files(ARITH_SPEC_PATH, SIMPLE_GTS_PATH)
    assert checked.ok
    return checked


def run(checked, text, env=None, **kw):
    return interpret(checked, "expr", inputs=(env or {},), text=text, externals=ARITH_CALLBACKS, **kw)


def test_walkthrough_value(arith):
    assert run(arith, "x*(3+2)", {"x": 4}) == (20,)


def test_single_literal(arith):
    assert run(arith, "7") == (7,)


def test_signs_and_precedence(arith):
    assert run(arith, "a-b*(a+b)-1", {"a": 2, "b": 3}) == (2 - 3 * 5 - 1,)


def test_whitespace_and_newlines(arith):
    assert run(arith, "  1 +\n\t2 * 3\n") == (7,)


def test_longest_match_makes_one_identifier(arith):
    tokens = tokenize_input(arith.spec.grammar, "ab12+3")
    assert [(t.symbol.name, t.text) for t in tokens] == [("VAR", "ab12"), ("+", "+"), ("INT", "3"), ("<EOF>", "")]


@pytest.mark.parametrize("text, where", [("(x+*3)", (1, 4)), ("", (1, 1)), ("1 2", (1, 3)), ("(1\n", (2, 1))])
def test_parse_errors_have_positions(arith, text, where):
    with pytest.raises(ParseError) as err:
        run(arith, text, {"x": 1})
    assert (err.value.line, err.value.column) == where


def test_parse_error_message(arith):
    with pytest.raises(ParseError, match=r"^1:4: Expected .*'\(' .* but found '\*'$"):
        run(arith, "(x+*3)", {"x": 1})


def test_lex_error(arith):
    with pytest.raises(LexError) as err:
        run(arith, "1 + $")
    assert err.value.column == 5


def test_host_failure_is_wrapped(arith):
    with pytest.raises(HostError) as err:
        run(arith, "y")
    assert err.value.function == "value"


def test_host_arity_is_checked(arith):
    bad = dict(ARITH_CALLBACKS, zero=lambda a: (0, 0))
    with pytest.raises(HostError, match="returned 2 value"):
        interpret(arith, "expr", inputs=({},), text="1", externals=bad)


def test_missing_bindings_are_reported_up_front(arith):
    partial = {k: v for k, v in ARITH_CALLBACKS.items() if k != "mul"}
    with pytest.raises(UnboundExternalError, match="mul"):
        interpret(arith, "expr", inputs=({},), text="$$$", externals=partial)


def test_debug_mode_accepts_well_typed_run(arith):
    assert run(arith, "x*(3+2)", {"x": 4}, debug=True) == (20,)


def test_debug_mode_rejects_wrong_tag(arith):
    bad = RuntimeValue({}, GroundType("Object"))
    with pytest.raises(TypeTagError):
        interpret(arith, "expr", inputs=(bad,), text="1", externals=ARITH_CALLBACKS, debug=True)
    # without the check the value simply flows through
    assert interpret(arith, "expr", inputs=(bad,), text="1", externals=ARITH_CALLBACKS) == (1,)


def test_tagged_results(arith):
    (out,) = run(arith, "1", raw=False)
    assert out.tag == GroundType("Int") and out.variant == "integer"


def test_other_start_rule(arith):
    assert interpret(arith, "term", inputs=({},), text="2*3", externals=ARITH_CALLBACKS) == (6,)


def test_wrong_input_count(arith):
    with pytest.raises(ValueError):
        interpret(arith, "expr", inputs=(), text="1", externals=ARITH_CALLBACKS)


def test_multiple_outputs(simple_ext):
    text = (
        "divide(Int x, Int y) --> (Int q, Int r); toInt(String s) --> (Int v);"
        "a : A B ; a() --> (Int q, Int r) { Int x; Int y; after A : x = toInt(A#); "
        "after B : (q, r) = divide(x, toInt(B#)); } A : '0'..'9'+ ; B : ',' '0'..'9'+ ;"
    )
    checked = analyze(text, simple_ext)
    assert checked.ok, checked.diagnostics
    cbs = {"divide": lambda a: divmod(a[0], a[1]), "toInt": lambda a: (int(a[0].lstrip(",")),)}
    assert interpret(checked, "a", text="17,5", externals=cbs) == (3, 2)


# -- evaluation agrees with Python arithmetic -----------------------------------------

VARS = {"x": 3, "y": -2, "zz": 7}


@st.composite
def arith_expr(draw, depth=3):
    if depth == 0 or draw(st.integers(0, 3)) == 0:
        return draw(st.one_of(st.sampled_from(sorted(VARS)), st.integers(0, 99).map(str)))
    kind = draw(st.sampled_from(["+", "-", "*", "()"]))
    if kind == "()":
        return "(" + draw(arith_expr(depth - 1)) + ")"
    return draw(arith_expr(depth - 1)) + f" {kind} " + draw(arith_expr(depth - 1))


@settings(max_examples=200, deadline=None)
@given(arith_expr())
def test_matches_python_evaluation(arith, text):
    assert run(arith, text, VARS) == (eval(text, {}, dict(VARS)),)
