"""Parser for type-system description files (``.gts``).

A file holds any number of three kinds of description::

    typesystem Simple(_, String) { type Int; Environment <: Object; }
    language Java for Simple { Int = 'int'; }
    backend 'org.example.Backend' for Java { parserName = 'P'; }

``_`` in the top-type position means the type system has no top type.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import E_DANGLING, E_DUPLICATE, E_TYPE_UNKNOWN, Diagnostic, DiagnosticError, SpecSyntaxError
from .lexer import IDENT, STRING, ParseAbort, TokenStream, tokenize
from .typesystem import BackendProfile, LanguageDesc, TypeSystemDesc, close_subtyping


@dataclass(frozen=True)
class TypeSystemFile:
    type_systems: tuple = ()
    languages: tuple = ()
    profiles: tuple = ()

    def type_system(self, name: str) -> TypeSystemDesc | None:
        return next((t for t in self.type_systems if t.name == name), None)

    def language(self, name: str) -> LanguageDesc | None:
        return next((l for l in self.languages if l.name == name), None)

    def profile(self, name: str) -> BackendProfile | None:
        """Find a profile by full back-end id or by its last dotted component."""
        for p in self.profiles:
            if name in (p.backend_id, p.short_name):
                return p
        return None


def _pairs(ts: TokenStream) -> tuple:
    ts.expect_punct("{")
    pairs = []
    while not ts.accept_punct("}"):
        key = ts.expect_kind(IDENT, "a name")
        ts.expect_punct("=")
        value = ts.expect_kind(STRING, "a quoted string")
        ts.expect_punct(";")
        pairs.append((key.text, value.text))
    return tuple(pairs)


def _typesystem(ts: TokenStream) -> TypeSystemDesc:
    kw = ts.expect_word("typesystem")
    name = ts.expect_kind(IDENT, "a type system name").text
    ts.expect_punct("(")
    top = ts.expect_kind(IDENT, "a top type name or '_'").text
    ts.expect_punct(",")
    string = ts.expect_kind(IDENT, "a string type name").text
    ts.expect_punct(")")
    ts.expect_punct("{")
    types, subs = [], []
    while not ts.accept_punct("}"):
        if ts.current.is_word("type") and ts.peek().kind == IDENT:
            ts.advance()
            types.append(ts.advance().text)
            ts.expect_punct(";")
        else:
            sub = ts.expect_kind(IDENT, "'type' or a subtyping rule").text
            ts.expect_punct("<:")
            sup = ts.expect_kind(IDENT, "a type name").text
            ts.expect_punct(";")
            subs.append((sub, sup))
    return TypeSystemDesc(name, string, None if top == "_" else top, tuple(types), tuple(subs), kw.span)


def _language(ts: TokenStream) -> LanguageDesc:
    kw = ts.expect_word("language")
    name = ts.expect_kind(IDENT, "a language name").text
    ts.expect_word("for")
    target = ts.expect_kind(IDENT, "a type system name").text
    return LanguageDesc(name, target, _pairs(ts), kw.span)


def _backend(ts: TokenStream) -> BackendProfile:
    kw = ts.expect_word("backend")
    backend_id = ts.expect_kind(STRING, "a quoted back-end id").text
    ts.expect_word("for")
    target = ts.expect_kind(IDENT, "a language name").text
    return BackendProfile(backend_id, target, _pairs(ts), kw.span)


def _validate(result: TypeSystemFile) -> list[Diagnostic]:
    diags = []
    for kind, items in (
        ("type system", result.type_systems),
        ("language", result.languages),
        ("back-end profile", result.profiles),
    ):
        seen = set()
        for item in items:
            key = getattr(item, "name", None) or item.backend_id
            if key in seen:
                diags.append(Diagnostic(E_DUPLICATE, f"Duplicate {kind} {key}", item.span))
            seen.add(key)
    for desc in result.type_systems:
        known = set(desc.all_type_names())
        seen_types = set()
        for t in desc.declared_types:
            if t in seen_types:
                diags.append(Diagnostic(E_DUPLICATE, f"Duplicate type {t} in {desc.name}", desc.span))
            seen_types.add(t)
        bad = [n for pair in desc.declared_subtypings for n in pair if n not in known]
        for n in dict.fromkeys(bad):
            diags.append(Diagnostic(E_TYPE_UNKNOWN, f"Unknown type {n} in type system {desc.name}", desc.span))
        if not bad:
            try:
                close_subtyping(desc)
            except DiagnosticError as e:
                diags.extend(e.diagnostics)
    for lang in result.languages:
        desc = result.type_system(lang.type_system)
        if desc is None:
            diags.append(Diagnostic(E_DANGLING, f"Language {lang.name} refers to unknown type system {lang.type_system}", lang.span))
            continue
        known = set(desc.all_type_names())
        for t, _ in lang.realizations:
            if t not in known:
                diags.append(Diagnostic(E_TYPE_UNKNOWN, f"Language {lang.name} realizes unknown type {t}", lang.span))
    for prof in result.profiles:
        if result.language(prof.language) is None:
            diags.append(
                Diagnostic(E_DANGLING, f"Back-end profile {prof.backend_id} refers to unknown language {prof.language}", prof.span)
            )
    return diags


def parse_type_system_file(text: str, file: str = "<input>") -> TypeSystemFile:
    """Parse and validate a description file; raises :class:`SpecSyntaxError`."""
    tokens, diags = tokenize(text, file)
    ts = TokenStream(tokens)
    systems, languages, profiles = [], [], []
    while not ts.at_end():
        try:
            if ts.current.is_word("typesystem"):
                systems.append(_typesystem(ts))
            elif ts.current.is_word("language"):
                languages.append(_language(ts))
            elif ts.current.is_word("backend"):
                profiles.append(_backend(ts))
            else:
                raise ParseAbort(ts.current, "'typesystem', 'language' or 'backend'")
        except ParseAbort as e:
            diags.append(e.diagnostic)
            while not ts.at_end() and not ts.advance().is_punct("}"):
                pass
    result = TypeSystemFile(tuple(systems), tuple(languages), tuple(profiles))
    if not diags:
        diags = _validate(result)
    if diags:
        raise SpecSyntaxError(diags)
    return result
