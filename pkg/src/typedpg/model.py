"""Syntax tree for translation functions, actions, statements and signatures."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .diagnostics import NO_SPAN, Span
from .grammar import GrammarModel, Site

INPUT, OUTPUT, LOCAL = "input", "output", "local"
BEFORE, AFTER, AT = "before", "after", "at"
DECLARED, INFERRED = "declared", "inferred"


@dataclass(frozen=True)
class TypeRef:
    """A ground type as written in a signature; resolved by the active extension."""

    text: str
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class AttrRef:
    name: str
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class TokenText:
    token: str
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class Call:
    function: str
    args: tuple = ()
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


Expression = Union[AttrRef, TokenText, Call]


@dataclass(frozen=True)
class Assign:
    targets: tuple  # attribute names; more than one means a tuple left-hand side
    rhs: Expression
    span: Span = field(default=NO_SPAN, compare=False, repr=False)
    target_spans: tuple = field(default=(), compare=False, repr=False)

    @property
    def is_tuple(self) -> bool:
        return len(self.targets) != 1


@dataclass(frozen=True)
class CallStmt:
    call: Call
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class Block:
    statements: tuple = ()
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


Statement = Union[Assign, CallStmt, Block]


@dataclass(frozen=True)
class AttributeDecl:
    name: str
    type: Optional[TypeRef]
    role: str
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class PositionedAction:
    position: str
    site: Site
    body: Statement
    span: Span = field(default=NO_SPAN, compare=False, repr=False)

    def at_call(self) -> Call | None:
        """The translation-function call of an 'at' action."""
        body = self.body
        if isinstance(body, Assign) and isinstance(body.rhs, Call):
            return body.rhs
        if isinstance(body, CallStmt):
            return body.call
        return None


@dataclass(frozen=True)
class TranslationFunction:
    name: str
    rule: str
    inputs: tuple = ()
    outputs: tuple = ()
    locals: tuple = ()
    actions: tuple = ()
    span: Span = field(default=NO_SPAN, compare=False, repr=False)

    def attributes(self) -> tuple:
        return self.inputs + self.outputs + self.locals


@dataclass(frozen=True)
class ExternalSignature:
    name: str
    inputs: tuple = ()
    outputs: tuple = ()
    origin: str = DECLARED
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class Declarations:
    """Extension-specific declarations preceding the grammar."""

    imports: tuple = ()
    options: tuple = ()  # (key, value) pairs in source order
    span: Span = field(default=NO_SPAN, compare=False, repr=False)

    def option(self, key: str, default: str | None = None) -> str | None:
        for k, v in self.options:
            if k == key:
                return v
        return default

    @property
    def empty(self) -> bool:
        return not self.imports and not self.options


@dataclass(frozen=True)
class Specification:
    grammar: GrammarModel = GrammarModel()
    functions: tuple = ()
    externals: tuple = ()
    declarations: Declarations = Declarations()
    file: str = field(default="<input>", compare=False)

    def functions_for(self, rule: str) -> list[TranslationFunction]:
        return [f for f in self.functions if f.rule == rule]

    def function(self, name: str) -> TranslationFunction | None:
        for f in self.functions:
            if f.name == name:
                return f
        return None

    def external(self, name: str) -> ExternalSignature | None:
        for e in self.externals:
            if e.name == name:
                return e
        return None


def statement_calls(stmt: Statement):
    """Yield every call expression in ``stmt``, outermost first."""
    if isinstance(stmt, Block):
        for s in stmt.statements:
            yield from statement_calls(s)
        return
    expr = stmt.rhs if isinstance(stmt, Assign) else stmt.call
    yield from expression_calls(expr)


def expression_calls(expr: Expression):
    if isinstance(expr, Call):
        yield expr
        for a in expr.args:
            yield from expression_calls(a)
