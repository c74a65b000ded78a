"""Diagnostics shared by every phase of the front-end."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

# Stable diagnostic codes.
E_SYNTAX = "E-SYNTAX"
E_UNDEFINED = "E-UNDEFINED"
E_DUPLICATE = "E-DUPLICATE"
E_LABEL_DUP = "E-LABEL-DUP"
E_CHAR_RANGE = "E-CHAR-RANGE"
E_FRAGMENT = "E-FRAGMENT"
E_SITE = "E-SITE"
E_AT = "E-AT"
E_DANGLING = "E-DANGLING"
E_CYCLE = "E-TYPE-CYCLE"
E_TYPE_UNKNOWN = "E-TYPE-UNKNOWN"
E_TYPE_INCOMPAT = "E-TYPE-INCOMPAT"
E_TYPE_AMBIG = "E-TYPE-AMBIG"
E_TYPE_NOTOP = "E-TYPE-NOTOP"
E_ARITY = "E-ARITY"
E_TUPLE_ARITY = "E-TUPLE-ARITY"
E_NAME = "E-NAME"
E_FLOW_UNINIT = "E-FLOW-UNINIT"
E_FLOW_OUTPUT = "E-FLOW-OUTPUT"
E_NOT_LL1 = "E-NOT-LL1"


@dataclass(frozen=True, order=True)
class Span:
    """A position in a source file. ``line`` and ``column`` are 1-based."""

    file: str = "<input>"
    line: int = 0
    column: int = 0
    length: int = 0

    def with_file(self, file: str) -> "Span":
        return Span(file, self.line, self.column, self.length)


NO_SPAN = Span()


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    span: Span = NO_SPAN
    severity: str = "error"

    @property
    def is_error(self) -> bool:
        return self.severity == "error"

    def render(self) -> str:
        s = self.span
        return f"{s.file}:{s.line}:{s.column}: {self.severity}[{self.code}]: {self.message}"

    def sort_key(self):
        s = self.span
        return (s.file, s.line, s.column, self.code, self.message)


def sort_diagnostics(diags: Iterable[Diagnostic]) -> list[Diagnostic]:
    return sorted(diags, key=Diagnostic.sort_key)


def error(code: str, message: str, span: Optional[Span] = None) -> Diagnostic:
    return Diagnostic(code, message, span or NO_SPAN)


class DiagnosticError(Exception):
    """Raised by operations that fail with one or more diagnostics."""

    def __init__(self, diagnostics: Iterable[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(d.message for d in self.diagnostics))

    @property
    def codes(self) -> list[str]:
        return [d.code for d in self.diagnostics]


class SpecSyntaxError(DiagnosticError):
    pass
