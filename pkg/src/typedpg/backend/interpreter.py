"""Direct execution of translation functions: lex, parse by recursive descent, run actions.

The interpreter stands in for compiling generated code. It shares the
placement of actions with the control-flow graphs (before actions, then
the match, then after actions) and decides alternatives and loops with a
single token of lookahead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Optional, Sequence

import regex

from ..dataflow import attach_actions
from ..grammar import TOKEN, Alt, CharRange, GrammarModel, Iter, Labeled, Opt, Rule, Seq, Symbol, SymRef
from ..model import Assign, AttrRef, Block, CallStmt, TokenText, TranslationFunction
from ..pipeline import CheckedSpec
from ..typechecker import EXTERNAL
from ..typesystem import GroundType
from .ll1 import EOF, LL1Analysis, NotLL1Error, check_ll1

HostCallback = Callable[[tuple], tuple]

__all__ = [
    "ExternalFunctionTable",
    "HostError",
    "InterpretError",
    "LexError",
    "NotLL1Error",
    "ParseError",
    "RuntimeValue",
    "Token",
    "TypeTagError",
    "UnboundExternalError",
    "interpret",
    "tokenize_input",
]


class InterpretError(Exception):
    pass


class LexError(InterpretError):
    def __init__(self, message: str, offset: int, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.offset, self.line, self.column = offset, line, column


class ParseError(InterpretError):
    def __init__(self, message: str, offset: int, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.offset, self.line, self.column = offset, line, column


class HostError(InterpretError):
    """An external callback failed or broke its signature."""

    def __init__(self, function: str, message: str):
        super().__init__(f"external function {function}: {message}")
        self.function = function


class UnboundExternalError(InterpretError):
    pass


class TypeTagError(InterpretError):
    """A value reached a slot whose static type does not admit its tag (debug mode only)."""


@dataclass(frozen=True)
class RuntimeValue:
    value: Any
    tag: GroundType

    @property
    def variant(self) -> str:
        if isinstance(self.value, str):
            return "string"
        if isinstance(self.value, int) and not isinstance(self.value, bool):
            return "integer"
        return "opaque"


@dataclass
class ExternalFunctionTable:
    bindings: dict = field(default_factory=dict)  # name -> HostCallback

    def bind(self, name: str, callback: HostCallback) -> None:
        self.bindings[name] = callback

    @classmethod
    def of(cls, mapping: Mapping[str, HostCallback]) -> "ExternalFunctionTable":
        return cls(dict(mapping))


# -- lexing --------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    symbol: Symbol
    text: str
    offset: int
    line: int
    column: int


_WHITESPACE = regex.compile(r"\s+")


def _token_pattern(grammar: GrammarModel, node, depth: int = 0) -> str:
    if isinstance(node, CharRange):
        return f"[{regex.escape(node.lo)}-{regex.escape(node.hi)}]"
    if isinstance(node, SymRef):
        if node.symbol.is_literal:
            return regex.escape(node.symbol.name)
        return f"(?:{_token_pattern(grammar, grammar.rule(node.symbol.name).rhs, depth + 1)})"
    if isinstance(node, Seq):
        return "".join(_token_pattern(grammar, c, depth) for c in node.children)
    if isinstance(node, Alt):
        return "(?:" + "|".join(_token_pattern(grammar, c, depth) for c in node.children) + ")"
    if isinstance(node, Iter):
        return f"(?:{_token_pattern(grammar, node.child, depth)})" + ("*" if node.min == 0 else "+")
    if isinstance(node, Opt):
        return f"(?:{_token_pattern(grammar, node.child, depth)})?"
    if isinstance(node, Labeled):
        return _token_pattern(grammar, node.child, depth)
    raise TypeError(node)


class _Lexer:
    def __init__(self, grammar: GrammarModel):
        self.patterns: list[tuple[Symbol, Any]] = []
        for lit in grammar.literals():
            # Literals come first so they win ties against token rules.
            self.patterns.append((Symbol.literal(lit), regex.compile(regex.escape(lit))))
        for rule in grammar.token_rules:
            if not rule.is_fragment:
                # POSIX matching makes each pattern report its longest match.
                pat = regex.compile(_token_pattern(grammar, rule.rhs), flags=regex.POSIX)
                self.patterns.append((Symbol(rule.name, TOKEN), pat))

    def tokens(self, text: str) -> list[Token]:
        out: list[Token] = []
        pos, line, col = 0, 1, 1

        def advance(upto: int):
            nonlocal pos, line, col
            chunk = text[pos:upto]
            nl = chunk.count("\n")
            if nl:
                line += nl
                col = len(chunk) - chunk.rfind("\n")
            else:
                col += len(chunk)
            pos = upto

        while True:
            ws = _WHITESPACE.match(text, pos)
            if ws:
                advance(ws.end())
            if pos >= len(text):
                out.append(Token(EOF, "", pos, line, col))
                return out
            best: Optional[tuple[Symbol, int]] = None
            for sym, pat in self.patterns:
                m = pat.match(text, pos)
                if m and m.end() > pos and (best is None or m.end() > best[1]):
                    best = (sym, m.end())
            if best is None:
                raise LexError(f"Unexpected character {text[pos]!r}", pos, line, col)
            out.append(Token(best[0], text[pos : best[1]], pos, line, col))
            advance(best[1])


def tokenize_input(grammar: GrammarModel, text: str) -> list[Token]:
    return _Lexer(grammar).tokens(text)


# -- parsing and execution -------------------------------------------------------


@dataclass
class _Frame:
    function: Optional[TranslationFunction]
    values: dict = field(default_factory=dict)  # attribute -> RuntimeValue
    token_texts: dict = field(default_factory=dict)  # token name -> last matched text


class _Interpreter:
    def __init__(self, checked: CheckedSpec, analysis: LL1Analysis, externals: ExternalFunctionTable, debug: bool):
        self.checked = checked
        self.spec = checked.spec
        self.grammar = checked.spec.grammar
        self.system = checked.system
        self.analysis = analysis
        self.externals = externals
        self.debug = debug
        self.tables: dict = {}
        self.tokens: list[Token] = []
        self.pos = 0

    # token stream

    @property
    def la(self) -> Token:
        return self.tokens[self.pos]

    def error(self, expected: str) -> ParseError:
        t = self.la
        found = "end of input" if t.symbol == EOF else repr(t.text)
        return ParseError(f"Expected {expected} but found {found}", t.offset, t.line, t.column)

    def match(self, sym: Symbol) -> Token:
        t = self.la
        if t.symbol != sym:
            raise self.error(f"'{sym.name}'" if sym.is_literal else sym.name)
        self.pos += 1
        return t

    # values

    def store(self, frame: _Frame, name: str, v: RuntimeValue) -> None:
        if self.debug and frame.function is not None:
            static = self.checked.attribute_type(frame.function.name, name)
            if static is not None and not self.system.is_subtype(v.tag, static):
                raise TypeTagError(f"{v.tag} value stored into {name} of type {static}")
        frame.values[name] = v

    def evaluate(self, frame: _Frame, e) -> tuple[RuntimeValue, ...]:
        if isinstance(e, AttrRef):
            if e.name not in frame.values:
                raise InterpretError(f"attribute {e.name} read before assignment")
            return (frame.values[e.name],)
        if isinstance(e, TokenText):
            if e.token not in frame.token_texts:
                raise InterpretError(f"text of {e.token} read before it was matched")
            return (RuntimeValue(frame.token_texts[e.token], self.system.string_type),)
        args = tuple(self.evaluate(frame, a)[0] for a in e.args)
        return self.call_external(e.function, args)

    def call_external(self, name: str, args: tuple[RuntimeValue, ...]) -> tuple[RuntimeValue, ...]:
        sig = self.checked.signatures[name]
        try:
            result = self.externals.bindings[name](tuple(a.value for a in args))
        except InterpretError:
            raise
        except Exception as exc:  # host code may raise anything
            raise HostError(name, f"{type(exc).__name__}: {exc}") from exc
        result = tuple(result) if isinstance(result, (tuple, list)) else (result,)
        outs = sig.output_types
        if len(result) != len(outs):
            raise HostError(name, f"returned {len(result)} value(s), expected {len(outs)}")
        return tuple(RuntimeValue(v, t) for v, t in zip(result, outs))

    def execute(self, frame: _Frame, s) -> None:
        if isinstance(s, Block):
            for sub in s.statements:
                self.execute(frame, sub)
        elif isinstance(s, CallStmt):
            self.evaluate(frame, s.call)
        else:
            values = self.evaluate(frame, s.rhs)
            for name, v in zip(s.targets, values):
                self.store(frame, name, v)

    # rules

    def run_function(self, f: Optional[TranslationFunction], rule: Rule, inputs: Sequence[RuntimeValue]) -> tuple:
        frame = _Frame(f)
        if f is not None:
            for d, v in zip(f.inputs, inputs):
                self.store(frame, d.name, v)
            key = f.name
            if key not in self.tables:
                self.tables[key] = attach_actions(rule, f)
            table = self.tables[key]
        else:
            table = {}
        self.walk(frame, table, rule, rule.rhs, ())
        if f is None:
            return ()
        return tuple(frame.values[d.name] for d in f.outputs)

    def invoke(self, frame: _Frame, name: str, at) -> None:
        rule = self.grammar.rule(name)
        if at is not None:
            call = at.at_call()
            target = self.spec.function(call.function)
            args = [self.evaluate(frame, a)[0] for a in call.args]
            outs = self.run_function(target, rule, args)
            if isinstance(at.body, Assign):
                for t, v in zip(at.body.targets, outs):
                    self.store(frame, t, v)
            return
        tfs = self.spec.functions_for(name)
        target = next((g for g in tfs if not g.inputs), None)
        self.run_function(target, rule, ())

    def walk(self, frame: _Frame, table: dict, rule: Rule, node, path: tuple) -> None:
        slot = table.get(path)
        if slot is not None:
            for a in slot.before:
                self.execute(frame, a.body)
        if isinstance(node, SymRef):
            sym = node.symbol
            if sym.is_nonterminal:
                self.invoke(frame, sym.name, slot.at if slot else None)
            else:
                tok = self.match(sym)
                if not sym.is_literal:
                    frame.token_texts[sym.name] = tok.text
        elif isinstance(node, Labeled):
            self.walk(frame, table, rule, node.child, path + (0,))
        elif isinstance(node, Seq):
            for i, c in enumerate(node.children):
                self.walk(frame, table, rule, c, path + (i,))
        elif isinstance(node, Alt):
            la = self.la.symbol
            chosen = next((i for i, c in enumerate(node.children) if la in self.analysis.first(c)), None)
            if chosen is None:
                chosen = next((i for i, c in enumerate(node.children) if self.analysis.nullable(c)), None)
            if chosen is None:
                raise self.error(_describe(self.analysis.first(node)))
            self.walk(frame, table, rule, node.children[chosen], path + (chosen,))
        elif isinstance(node, Opt):
            if self.la.symbol in self.analysis.first(node.child):
                self.walk(frame, table, rule, node.child, path + (0,))
        elif isinstance(node, Iter):
            first = self.analysis.first(node.child)
            if node.min > 0:
                self.walk(frame, table, rule, node.child, path + (0,))
            while self.la.symbol in first:
                self.walk(frame, table, rule, node.child, path + (0,))
        else:
            raise TypeError(node)
        if slot is not None:
            for a in slot.after:
                self.execute(frame, a.body)


def _describe(symbols) -> str:
    names = sorted(f"'{s.name}'" if s.is_literal else s.name for s in symbols)
    return " or ".join(names) if names else "end of input"


def _required_externals(checked: CheckedSpec) -> list[str]:
    return sorted(n for n, s in checked.signatures.items() if s.kind == EXTERNAL)


def interpret(
    checked: CheckedSpec,
    start_rule: str,
    start_function: Optional[str] = None,
    inputs: Sequence[Any] = (),
    text: str = "",
    externals: ExternalFunctionTable | Mapping[str, HostCallback] | None = None,
    debug: bool = False,
    raw: bool = True,
) -> tuple:
    """Parse ``text`` from ``start_rule`` while running ``start_function``.

    Returns the outputs of the start function as plain values (or as
    :class:`RuntimeValue` objects when ``raw`` is false). The grammar is
    checked for LL(1) decisions and the externals for completeness before
    any input is read. ``debug`` verifies that every stored value's type tag
    is a subtype of the slot's static type.
    """
    if not checked.ok:
        raise ValueError("the specification has errors")
    rule = checked.spec.grammar.rule(start_rule)
    if rule is None or rule.is_token:
        raise ValueError(f"unknown syntactic rule {start_rule!r}")
    analysis = check_ll1(checked.spec.grammar, start_rule)
    if not isinstance(externals, ExternalFunctionTable):
        externals = ExternalFunctionTable(dict(externals or {}))
    missing = [n for n in _required_externals(checked) if n not in externals.bindings]
    if missing:
        raise UnboundExternalError("no binding for external function(s): " + ", ".join(missing))
    if start_function is None:
        tfs = checked.spec.functions_for(start_rule)
        named = [f for f in tfs if f.name == start_rule]
        f = (named or tfs or [None])[0]
    else:
        f = checked.spec.function(start_function)
        if f is None or f.rule != start_rule:
            raise ValueError(f"{start_function!r} is not a translation function of {start_rule}")
    sig = checked.signatures.get(f.name) if f is not None else None
    in_types = sig.input_types if sig is not None else []
    if len(inputs) != len(in_types):
        raise ValueError(f"expected {len(in_types)} input value(s), got {len(inputs)}")
    values = [v if isinstance(v, RuntimeValue) else RuntimeValue(v, t) for v, t in zip(inputs, in_types)]
    machine = _Interpreter(checked, analysis, externals, debug)
    machine.tokens = tokenize_input(checked.spec.grammar, text)
    outs = machine.run_function(f, rule, values)
    if machine.la.symbol != EOF:
        raise machine.error("end of input")
    return tuple(v.value for v in outs) if raw else outs
