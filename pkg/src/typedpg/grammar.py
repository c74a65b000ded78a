"""In-memory grammar model: rules, right-hand-side trees, labels and occurrences."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

from .diagnostics import (
    E_CHAR_RANGE,
    E_DUPLICATE,
    E_FRAGMENT,
    E_LABEL_DUP,
    E_SITE,
    E_UNDEFINED,
    NO_SPAN,
    Diagnostic,
    DiagnosticError,
    Span,
)

TOKEN = "token-rule"
SYNTACTIC = "syntactic-rule"
LITERAL = "literal"


def is_token_name(name: str) -> bool:
    """Rules named entirely in upper case are token rules."""
    return name.isupper()


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: str

    @classmethod
    def ref(cls, name: str) -> "Symbol":
        return cls(name, TOKEN if is_token_name(name) else SYNTACTIC)

    @classmethod
    def literal(cls, text: str) -> "Symbol":
        return cls(text, LITERAL)

    @property
    def is_literal(self) -> bool:
        return self.kind == LITERAL

    @property
    def is_token(self) -> bool:
        return self.kind != SYNTACTIC

    @property
    def is_nonterminal(self) -> bool:
        return self.kind == SYNTACTIC


# Right-hand-side expression tree. Spans are excluded from equality so that
# structurally identical trees compare equal regardless of layout.


@dataclass(frozen=True)
class Seq:
    children: tuple = ()
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class Alt:
    children: tuple = ()
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class Iter:
    child: "RhsExpr"
    min: int = 0
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class Opt:
    child: "RhsExpr"
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class SymRef:
    symbol: Symbol
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class CharRange:
    lo: str
    hi: str
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class Labeled:
    label: str
    child: "RhsExpr"
    span: Span = field(default=NO_SPAN, compare=False, repr=False)


RhsExpr = Union[Seq, Alt, Iter, Opt, SymRef, CharRange, Labeled]
Path = tuple


def children(node: RhsExpr) -> tuple:
    if isinstance(node, (Seq, Alt)):
        return node.children
    if isinstance(node, (Iter, Opt, Labeled)):
        return (node.child,)
    return ()


def walk(node: RhsExpr, path: Path = ()) -> Iterator[tuple[Path, RhsExpr]]:
    """Pre-order traversal yielding ``(path, node)`` pairs."""
    yield path, node
    for i, child in enumerate(children(node)):
        yield from walk(child, path + (i,))


def node_at(node: RhsExpr, path: Path) -> RhsExpr:
    for i in path:
        node = children(node)[i]
    return node


@dataclass(frozen=True)
class Rule:
    name: str
    rhs: RhsExpr
    is_token: bool = False
    is_fragment: bool = False
    span: Span = field(default=NO_SPAN, compare=False, repr=False)

    def labels(self) -> dict[str, Path]:
        return {n.label: p for p, n in walk(self.rhs) if isinstance(n, Labeled)}

    def symbol_refs(self) -> list[tuple[Path, SymRef]]:
        return [(p, n) for p, n in walk(self.rhs) if isinstance(n, SymRef)]


@dataclass(frozen=True)
class GrammarModel:
    rules: tuple = ()

    def rule(self, name: str) -> Rule | None:
        for r in self.rules:
            if r.name == name:
                return r
        return None

    @property
    def token_rules(self) -> list[Rule]:
        return [r for r in self.rules if r.is_token]

    @property
    def syntactic_rules(self) -> list[Rule]:
        return [r for r in self.rules if not r.is_token]

    def literals(self) -> list[str]:
        """Literal texts used in syntactic rules, in order of first appearance."""
        seen: dict[str, None] = {}
        for r in self.syntactic_rules:
            for _, ref in r.symbol_refs():
                if ref.symbol.is_literal:
                    seen.setdefault(ref.symbol.name, None)
        return list(seen)


@dataclass(frozen=True, order=True)
class Occurrence:
    rule: str
    path: Path
    name: str


# Action sites: a label ($f1), a symbol name (factor) or a literal text ('-').

@dataclass(frozen=True)
class Site:
    kind: str  # "label" | "symbol" | "literal"
    name: str

    def __str__(self) -> str:
        if self.kind == "label":
            return "$" + self.name
        if self.kind == "literal":
            return quote_literal(self.name)
        return self.name

    @classmethod
    def parse(cls, text: str) -> "Site":
        if text.startswith("$"):
            return cls("label", text[1:])
        if len(text) >= 2 and text[0] == "'" and text[-1] == "'":
            return cls("literal", unquote_literal(text))
        return cls("symbol", text)


_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "\\": "\\", "'": "'"}
_UNESCAPES = {v: "\\" + k for k, v in _ESCAPES.items()}


def quote_literal(text: str) -> str:
    return "'" + "".join(_UNESCAPES.get(c, c) for c in text) + "'"


def unquote_literal(quoted: str) -> str:
    body = quoted[1:-1]
    out = []
    i = 0
    while i < len(body):
        c = body[i]
        if c == "\\" and i + 1 < len(body):
            out.append(_ESCAPES.get(body[i + 1], body[i + 1]))
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


class UnknownSiteError(DiagnosticError):
    pass


def resolve_action_site(rule: Rule, site: Site | str, span: Span = NO_SPAN) -> list[Occurrence]:
    """Return every occurrence in ``rule`` that an action at ``site`` attaches to.

    A label names exactly one phrase; a symbol or literal names all of its
    occurrences in the rule. Raises :class:`UnknownSiteError` when nothing matches.
    """
    if isinstance(site, str):
        site = Site.parse(site)
    found: list[Occurrence] = []
    for path, node in walk(rule.rhs):
        if site.kind == "label":
            if isinstance(node, Labeled) and node.label == site.name:
                found.append(Occurrence(rule.name, path, str(site)))
        elif isinstance(node, SymRef):
            sym = node.symbol
            if sym.name == site.name and sym.is_literal == (site.kind == "literal"):
                found.append(Occurrence(rule.name, path, str(site)))
    if not found:
        raise UnknownSiteError(
            [Diagnostic(E_SITE, f"Unknown site {site} in rule {rule.name}", span)]
        )
    return sorted(found)


def validate_grammar(model: GrammarModel) -> list[Diagnostic]:
    """Check the structural invariants of ``model``; returns the violations."""
    diags: list[Diagnostic] = []
    by_name: dict[str, Rule] = {}
    for rule in model.rules:
        if rule.name in by_name:
            diags.append(Diagnostic(E_DUPLICATE, f"Duplicate rule {rule.name}", rule.span))
        else:
            by_name[rule.name] = rule
        if rule.is_fragment and not rule.is_token:
            diags.append(
                Diagnostic(E_FRAGMENT, f"Fragment rule {rule.name} must be a token rule", rule.span)
            )
    for rule in model.rules:
        seen_labels: set[str] = set()
        for _, node in walk(rule.rhs):
            if isinstance(node, Labeled):
                if node.label in seen_labels:
                    diags.append(Diagnostic(E_LABEL_DUP, f"Duplicate label {node.label}", node.span))
                seen_labels.add(node.label)
            elif isinstance(node, CharRange) and not rule.is_token:
                diags.append(
                    Diagnostic(
                        E_CHAR_RANGE,
                        f"Character range can only appear in token rules (rule {rule.name})",
                        node.span,
                    )
                )
            elif isinstance(node, SymRef) and not node.symbol.is_literal:
                target = by_name.get(node.symbol.name)
                if target is None:
                    diags.append(
                        Diagnostic(E_UNDEFINED, f"Undefined symbol {node.symbol.name}", node.span)
                    )
                elif rule.is_token and not target.is_token:
                    diags.append(
                        Diagnostic(
                            E_UNDEFINED,
                            f"Token rule {rule.name} refers to syntactic rule {target.name}",
                            node.span,
                        )
                    )
                elif not rule.is_token and target.is_fragment:
                    diags.append(
                        Diagnostic(
                            E_FRAGMENT,
                            f"Fragment rule {target.name} can not be used in syntactic rule {rule.name}",
                            node.span,
                        )
                    )
    diags.extend(_token_recursion(model, by_name))
    return diags


def _token_recursion(model: GrammarModel, by_name: dict[str, Rule]) -> list[Diagnostic]:
    # Token rules are compiled to regular expressions, so they can not recurse.
    deps = {
        r.name: {n.symbol.name for _, n in r.symbol_refs() if not n.symbol.is_literal}
        for r in model.token_rules
    }
    diags = []
    for start in deps:
        stack, seen = list(deps[start]), set()
        while stack:
            name = stack.pop()
            if name == start:
                diags.append(
                    Diagnostic(E_UNDEFINED, f"Token rule {start} is recursive", by_name[start].span)
                )
                break
            if name in seen or name not in deps:
                continue
            seen.add(name)
            stack.extend(deps[name])
    return diags
