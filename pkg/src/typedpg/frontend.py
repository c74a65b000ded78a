"""Parser and pretty-printer for specification files (``.tpg``).

Layout of a specification::

    specification : declarations? (externalSignature | (grammarRule translationFunction*))* ;

Declarations and the syntax of ground types come from the active
:class:`~typedpg.extensions.Extension`.
"""

from __future__ import annotations

from typing import Optional

from .diagnostics import E_AT, E_SYNTAX, Diagnostic, SpecSyntaxError
from .extensions import DeclarativeExtension, Extension
from .grammar import (
    Alt,
    CharRange,
    GrammarModel,
    Iter,
    Labeled,
    Opt,
    Rule,
    Seq,
    Site,
    SymRef,
    Symbol,
    UnknownSiteError,
    is_token_name,
    quote_literal,
    resolve_action_site,
    validate_grammar,
)
from .lexer import EOF, IDENT, LABEL, PUNCT, STRING, TOKEN_TEXT, ParseAbort, TokenStream, tokenize
from .model import (
    AFTER,
    AT,
    BEFORE,
    INPUT,
    LOCAL,
    OUTPUT,
    Assign,
    AttrRef,
    AttributeDecl,
    Block,
    Call,
    CallStmt,
    Declarations,
    ExternalSignature,
    PositionedAction,
    Specification,
    TokenText,
    TranslationFunction,
)

POSITIONS = (BEFORE, AFTER, AT)


class _Parser:
    def __init__(self, ts: TokenStream, extension: Extension, file: str):
        self.ts = ts
        self.ext = extension
        self.file = file
        self.diags: list[Diagnostic] = []

    # -- recovery -------------------------------------------------------

    def _skip_past(self, *stops: str) -> None:
        """Skip tokens until one of ``stops`` (at bracket depth 0) has been consumed."""
        ts = self.ts
        depth = 0
        while not ts.at_end():
            tok = ts.advance()
            if tok.kind != PUNCT:
                continue
            if tok.text in ("(", "{"):
                depth += 1
            elif tok.text in (")", "}"):
                if depth == 0 and tok.text in stops:
                    return
                depth = max(0, depth - 1)
                if depth == 0 and tok.text == "}" and "}" in stops:
                    return
            elif depth == 0 and tok.text in stops:
                return

    # -- top level ------------------------------------------------------

    def specification(self) -> Specification:
        ts = self.ts
        decls = Declarations()
        try:
            decls = self.ext.parse_declarations(ts)
        except ParseAbort as e:
            self.diags.append(e.diagnostic)
            self._skip_past(";", "}")
        rules: list[Rule] = []
        functions: list[TranslationFunction] = []
        externals: list[ExternalSignature] = []
        current: Optional[Rule] = None
        while not ts.at_end():
            try:
                tok = ts.current
                if tok.is_word("fragment") or (tok.kind == IDENT and ts.peek().is_punct(":")):
                    current = self.rule()
                    rules.append(current)
                elif tok.kind == IDENT and ts.peek().is_punct("("):
                    sig = self.signature()
                    if isinstance(sig, ExternalSignature):
                        externals.append(sig)
                        current = None
                    else:
                        name, inputs, outputs, span = sig
                        if current is None:
                            self.diags.append(
                                Diagnostic(
                                    E_SYNTAX,
                                    f"Translation function {name} must follow the syntactic rule it belongs to",
                                    span,
                                )
                            )
                            self.function_body(name, "", inputs, outputs, span)
                        else:
                            if current.is_token:
                                self.diags.append(
                                    Diagnostic(
                                        E_SYNTAX,
                                        f"Translation function {name} can not be attached to token rule {current.name}",
                                        span,
                                    )
                                )
                            functions.append(self.function_body(name, current.name, inputs, outputs, span))
                else:
                    raise ParseAbort(tok, "a grammar rule or a function signature")
            except ParseAbort as e:
                self.diags.append(e.diagnostic)
                self._skip_past(";", "}")
        return Specification(GrammarModel(tuple(rules)), tuple(functions), tuple(externals), decls, self.file)

    # -- grammar rules --------------------------------------------------

    def rule(self) -> Rule:
        ts = self.ts
        fragment = ts.accept_word("fragment") is not None
        name_tok = ts.expect_kind(IDENT, "a rule name")
        ts.expect_punct(":")
        rhs = self.alternatives()
        ts.expect_punct(";")
        return Rule(name_tok.text, rhs, is_token_name(name_tok.text), fragment, name_tok.span)

    def alternatives(self):
        first = self.ts.current.span
        alts = [self.sequence()]
        while self.ts.accept_punct("|"):
            alts.append(self.sequence())
        return alts[0] if len(alts) == 1 else Alt(tuple(alts), first)

    def sequence(self):
        ts = self.ts
        first = ts.current.span
        items = []
        while not (ts.current.kind == EOF or any(ts.current.is_punct(p) for p in ("|", ")", ";"))):
            items.append(self.element())
        return items[0] if len(items) == 1 else Seq(tuple(items), first)

    def element(self):
        ts = self.ts
        if ts.current.kind == LABEL:
            label = ts.advance()
            ts.expect_punct("=")
            return Labeled(label.text, self.suffixed(), label.span)
        return self.suffixed()

    def suffixed(self):
        ts = self.ts
        node = self.atom()
        while True:
            tok = ts.current
            if tok.is_punct("*"):
                node = Iter(node, 0, tok.span)
            elif tok.is_punct("+"):
                node = Iter(node, 1, tok.span)
            elif tok.is_punct("?"):
                node = Opt(node, tok.span)
            else:
                return node
            ts.advance()

    def atom(self):
        ts = self.ts
        tok = ts.current
        if tok.kind == IDENT:
            ts.advance()
            return SymRef(Symbol.ref(tok.text), tok.span)
        if tok.kind == STRING:
            ts.advance()
            if ts.accept_punct(".."):
                hi = ts.expect_kind(STRING, "a character literal")
                if len(tok.text) != 1 or len(hi.text) != 1:
                    self.diags.append(Diagnostic(E_SYNTAX, "Character range bounds must be single characters", tok.span))
                return CharRange(tok.text, hi.text, tok.span)
            if tok.text == "":
                self.diags.append(Diagnostic(E_SYNTAX, "Empty literal", tok.span))
            return SymRef(Symbol.literal(tok.text), tok.span)
        if tok.is_punct("("):
            ts.advance()
            inner = self.alternatives()
            ts.expect_punct(")")
            return inner
        raise ParseAbort(tok, "a symbol, a literal or '('")

    # -- signatures -----------------------------------------------------

    def attribute_list(self, role: str) -> tuple:
        ts = self.ts
        ts.expect_punct("(")
        decls = []
        if not ts.current.is_punct(")"):
            while True:
                ty = self.ext.parse_type(ts)
                name = ts.expect_kind(IDENT, "an attribute name")
                decls.append(AttributeDecl(name.text, ty, role, name.span))
                if not ts.accept_punct(","):
                    break
        ts.expect_punct(")")
        return tuple(decls)

    def signature(self):
        ts = self.ts
        name = ts.expect_kind(IDENT, "a function name")
        inputs = self.attribute_list(INPUT)
        ts.expect_punct("-->")
        outputs = self.attribute_list(OUTPUT)
        if ts.accept_punct(";"):
            return ExternalSignature(name.text, inputs, outputs, span=name.span)
        if not ts.current.is_punct("{"):
            raise ParseAbort(ts.current, "';' or '{'")
        return name.text, inputs, outputs, name.span

    # -- translation function bodies -------------------------------------

    def function_body(self, name, rule, inputs, outputs, span) -> TranslationFunction:
        ts = self.ts
        ts.expect_punct("{")
        locals_: list[AttributeDecl] = []
        actions: list[PositionedAction] = []
        while not ts.current.is_punct("}"):
            if ts.at_end():
                raise ParseAbort(ts.current, "'}'")
            try:
                if ts.current.kind == IDENT and ts.current.text in POSITIONS:
                    actions.append(self.action())
                else:
                    ty = self.ext.parse_type(ts)
                    local = ts.expect_kind(IDENT, "a local attribute name")
                    ts.expect_punct(";")
                    locals_.append(AttributeDecl(local.text, ty, LOCAL, local.span))
            except ParseAbort as e:
                self.diags.append(e.diagnostic)
                self._skip_past(";", "}")
        ts.expect_punct("}")
        return TranslationFunction(name, rule, inputs, outputs, tuple(locals_), tuple(actions), span)

    def action(self) -> PositionedAction:
        ts = self.ts
        pos = ts.advance()
        tok = ts.current
        if tok.kind == LABEL:
            site = Site("label", tok.text)
        elif tok.kind == STRING:
            site = Site("literal", tok.text)
        elif tok.kind == IDENT:
            site = Site("symbol", tok.text)
        else:
            raise ParseAbort(tok, "an action site (symbol, literal or label)")
        ts.advance()
        ts.expect_punct(":")
        body = self.statement()
        action = PositionedAction(pos.text, site, body, pos.span)
        if pos.text == AT and (action.at_call() is None or isinstance(body, Block)):
            self.diags.append(
                Diagnostic(E_AT, "Only a call to a translation function is allowed in an 'at' action", body.span)
            )
        return action

    def statement(self):
        ts = self.ts
        tok = ts.current
        if tok.is_punct("{"):
            ts.advance()
            stmts = []
            while not ts.current.is_punct("}"):
                if ts.at_end():
                    raise ParseAbort(ts.current, "'}'")
                stmts.append(self.statement())
            ts.advance()
            return Block(tuple(stmts), tok.span)
        if tok.is_punct("("):
            ts.advance()
            names = [ts.expect_kind(IDENT, "an attribute name")]
            while ts.accept_punct(","):
                names.append(ts.expect_kind(IDENT, "an attribute name"))
            ts.expect_punct(")")
            ts.expect_punct("=")
            rhs = self.expression()
            ts.expect_punct(";")
            return Assign(tuple(n.text for n in names), rhs, tok.span, tuple(n.span for n in names))
        if tok.kind == IDENT and ts.peek().is_punct("="):
            ts.advance()
            ts.advance()
            rhs = self.expression()
            ts.expect_punct(";")
            return Assign((tok.text,), rhs, tok.span, (tok.span,))
        if tok.kind == IDENT and ts.peek().is_punct("("):
            call = self.expression()
            ts.expect_punct(";")
            return CallStmt(call, tok.span)
        raise ParseAbort(tok, "a statement")

    def expression(self):
        ts = self.ts
        tok = ts.current
        if tok.kind == TOKEN_TEXT:
            ts.advance()
            return TokenText(tok.text, tok.span)
        if tok.kind == IDENT:
            ts.advance()
            if not ts.accept_punct("("):
                return AttrRef(tok.text, tok.span)
            args = []
            if not ts.current.is_punct(")"):
                while True:
                    args.append(self.expression())
                    if not ts.accept_punct(","):
                        break
            ts.expect_punct(")")
            return Call(tok.text, tuple(args), tok.span)
        raise ParseAbort(tok, "an expression")


def parse_specification(
    text: str,
    file: str = "<input>",
    extension: Extension | None = None,
    strict: bool = False,
) -> Specification:
    """Parse a specification; raises :class:`SpecSyntaxError` on any syntax error.

    With ``strict=True`` the grammar is also validated and every action site
    resolved, so that the returned model is free of name errors.
    """
    extension = extension or DeclarativeExtension()
    try:
        tokens, diags = tokenize(text, file)
        parser = _Parser(TokenStream(tokens), extension, file)
        spec = parser.specification()
    except RecursionError:
        raise SpecSyntaxError([Diagnostic(E_SYNTAX, "Specification is nested too deeply")]) from None
    diags += parser.diags
    if not diags and strict:
        diags = validate_grammar(spec.grammar) + site_diagnostics(spec)
    if diags:
        raise SpecSyntaxError(sorted(diags, key=Diagnostic.sort_key))
    return spec


def site_diagnostics(spec: Specification, function: TranslationFunction | None = None) -> list[Diagnostic]:
    """Resolve the action sites of one function (or all) against their rules."""
    diags = []
    for f in [function] if function is not None else spec.functions:
        rule = spec.grammar.rule(f.rule)
        if rule is None:
            continue
        for action in f.actions:
            try:
                resolve_action_site(rule, action.site, action.span)
            except UnknownSiteError as e:
                diags.extend(e.diagnostics)
    return diags


def parse_declarations(text: str, extension: Extension, file: str = "<input>") -> Declarations:
    """Parse a stand-alone declarations section with ``extension``'s sub-grammar."""
    tokens, diags = tokenize(text, file)
    ts = TokenStream(tokens)
    decls = Declarations()
    try:
        decls = extension.parse_declarations(ts)
        if not ts.at_end():
            raise ParseAbort(ts.current, "a declaration")
    except ParseAbort as e:
        diags.append(e.diagnostic)
    if diags:
        raise SpecSyntaxError(diags)
    return decls


# -- pretty printing ------------------------------------------------------


def format_rhs(node, ctx: str = "top") -> str:
    """Render a right-hand side; ``ctx`` is one of top, alt, seq, atom."""
    if isinstance(node, SymRef):
        sym = node.symbol
        return quote_literal(sym.name) if sym.is_literal else sym.name
    if isinstance(node, CharRange):
        return f"{quote_literal(node.lo)}..{quote_literal(node.hi)}"
    if isinstance(node, Alt):
        text = " | ".join(format_rhs(c, "alt") for c in node.children)
        return text if ctx == "top" else f"({text})"
    if isinstance(node, Seq):
        text = " ".join(format_rhs(c, "seq") for c in node.children)
        return text if ctx in ("top", "alt") else f"({text})"
    if isinstance(node, (Iter, Opt)):
        suffix = "?" if isinstance(node, Opt) else ("+" if node.min else "*")
        text = format_rhs(node.child, "atom") + suffix
        return f"({text})" if ctx == "atom" else text
    if isinstance(node, Labeled):
        text = f"${node.label}={format_rhs(node.child, 'atom')}"
        return f"({text})" if ctx == "atom" else text
    raise TypeError(node)


def format_rule(rule: Rule) -> str:
    prefix = "fragment " if rule.is_fragment else ""
    return f"{prefix}{rule.name} : {format_rhs(rule.rhs)} ;"


def format_expression(e) -> str:
    if isinstance(e, TokenText):
        return e.token + "#"
    if isinstance(e, AttrRef):
        return e.name
    return f"{e.function}({', '.join(format_expression(a) for a in e.args)})"


def format_statement(s) -> str:
    if isinstance(s, Block):
        return "{ " + " ".join(format_statement(x) for x in s.statements) + " }"
    if isinstance(s, CallStmt):
        return format_expression(s.call) + ";"
    lhs = s.targets[0] if not s.is_tuple else "(" + ", ".join(s.targets) + ")"
    return f"{lhs} = {format_expression(s.rhs)};"


def _attrs(decls) -> str:
    return "(" + ", ".join(f"{d.type.text} {d.name}" for d in decls) + ")"


def format_specification(spec: Specification) -> str:
    lines: list[str] = []
    d = spec.declarations
    if d.options:
        lines.append("#javaoptions {")
        lines.extend(f"  {k} = {quote_literal(v)};" for k, v in d.options)
        lines.append("}")
    lines.extend(f"import {imp};" for imp in d.imports)
    for ext in spec.externals:
        lines.append(f"{ext.name}{_attrs(ext.inputs)} --> {_attrs(ext.outputs)};")
    for rule in spec.grammar.rules:
        lines.append(format_rule(rule))
        for f in spec.functions_for(rule.name):
            lines.append(f"  {f.name}{_attrs(f.inputs)} --> {_attrs(f.outputs)} {{")
            lines.extend(f"    {loc.type.text} {loc.name};" for loc in f.locals)
            for a in f.actions:
                lines.append(f"    {a.position} {a.site} : {format_statement(a.body)}")
            lines.append("  }")
    return "\n".join(lines) + "\n"
