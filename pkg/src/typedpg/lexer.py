"""Tokenizer shared by specification files and type-system description files."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .diagnostics import E_SYNTAX, Diagnostic, Span
from .grammar import unquote_literal

IDENT = "IDENT"
LABEL = "LABEL"
TOKEN_TEXT = "TOKEN_TEXT"
STRING = "STRING"
DIRECTIVE = "DIRECTIVE"
PUNCT = "PUNCT"
EOF = "EOF"

_PUNCT = ["-->", "..", "<:", ":", ";", "|", "(", ")", "*", "+", "?", "{", "}", ",", "=", ".", "<", ">", "[", "]"]

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n\f\v]+)
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*.*?\*/)
  | (?P<label>\$[A-Za-z_][A-Za-z0-9_]*)
  | (?P<token_text>[A-Za-z_][A-Za-z0-9_]*\#)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<directive>\#[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>'(?:[^'\\\n]|\\.)*')
  | (?P<punct>"""
    + "|".join(re.escape(p) for p in _PUNCT)
    + r""")
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: Span

    def is_punct(self, text: str) -> bool:
        return self.kind == PUNCT and self.text == text

    def is_word(self, text: str) -> bool:
        return self.kind == IDENT and self.text == text


def tokenize(text: str, file: str = "<input>") -> tuple[list[Token], list[Diagnostic]]:
    """Split ``text`` into tokens; unrecognized characters become diagnostics."""
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            ch = text[pos]
            if text.startswith("/*", pos):
                msg = "Unterminated comment"
                end = n
            elif ch == "'":
                msg = "Unterminated string literal"
                nl = text.find("\n", pos)
                end = n if nl < 0 else nl
            else:
                msg = f"Unexpected character {ch!r}"
                end = pos + 1
            diags.append(Diagnostic(E_SYNTAX, msg, Span(file, line, col, end - pos)))
            chunk = text[pos:end]
        else:
            kind = m.lastgroup
            chunk = m.group()
            span = Span(file, line, col, len(chunk))
            if kind == "label":
                tokens.append(Token(LABEL, chunk[1:], span))
            elif kind == "token_text":
                tokens.append(Token(TOKEN_TEXT, chunk[:-1], span))
            elif kind == "ident":
                tokens.append(Token(IDENT, chunk, span))
            elif kind == "directive":
                tokens.append(Token(DIRECTIVE, chunk, span))
            elif kind == "string":
                tokens.append(Token(STRING, unquote_literal(chunk), span))
            elif kind == "punct":
                tokens.append(Token(PUNCT, chunk, span))
            end = m.end()
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rfind("\n") + 1
        pos = end
    tokens.append(Token(EOF, "", Span(file, line, pos - line_start + 1, 0)))
    return tokens, diags


class TokenStream:
    """Cursor over a token list with the small helpers recursive descent needs."""

    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def at_end(self) -> bool:
        return self.current.kind == EOF

    def advance(self) -> Token:
        tok = self.current
        if tok.kind != EOF:
            self.pos += 1
        return tok

    def accept_punct(self, text: str) -> Token | None:
        if self.current.is_punct(text):
            return self.advance()
        return None

    def accept_word(self, text: str) -> Token | None:
        if self.current.is_word(text):
            return self.advance()
        return None

    def expect_punct(self, text: str) -> Token:
        if not self.current.is_punct(text):
            raise ParseAbort(self.current, f"'{text}'")
        return self.advance()

    def expect_kind(self, kind: str, what: str) -> Token:
        if self.current.kind != kind:
            raise ParseAbort(self.current, what)
        return self.advance()

    def expect_word(self, text: str) -> Token:
        if not self.current.is_word(text):
            raise ParseAbort(self.current, f"'{text}'")
        return self.advance()


def describe(tok: Token) -> str:
    if tok.kind == EOF:
        return "end of input"
    if tok.kind == STRING:
        return f"string '{tok.text}'"
    if tok.kind == LABEL:
        return f"label ${tok.text}"
    if tok.kind == TOKEN_TEXT:
        return f"'{tok.text}#'"
    return f"'{tok.text}'"


class ParseAbort(Exception):
    """Internal: unwinds the parser to the nearest resynchronization point."""

    def __init__(self, tok: Token, expected: str):
        self.diagnostic = Diagnostic(E_SYNTAX, f"Expected {expected} but found {describe(tok)}", tok.span)
        super().__init__(self.diagnostic.message)
