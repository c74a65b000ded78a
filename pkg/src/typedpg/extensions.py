"""Front-end extensions: ground-type syntax, declarations and type-system realization.

An extension supplies the two pieces of the specification syntax left open by
the core notation (``type`` and ``declarations``) plus the ground type system
the checker runs against. Two realizations ship with the package:

``declarative``
    types are single identifiers naming types of a :class:`TypeSystemDesc`
    read from a ``.gts`` file; no declarations.
``imports``
    dotted, Java-style class names resolved through ``import`` declarations,
    with an optional ``#javaoptions { key = 'value'; }`` block and purely
    nominal subtyping.
"""

from __future__ import annotations

import re
from abc import ABC, abstractmethod
from typing import Callable, Iterable, Optional

from .diagnostics import E_TYPE_UNKNOWN, Diagnostic, DiagnosticError
from .lexer import DIRECTIVE, IDENT, STRING, ParseAbort, TokenStream
from .model import Declarations, Specification, TypeRef
from .typesystem import (
    GroundType,
    GroundTypeSystem,
    LanguageDesc,
    TypeSystemDesc,
    close_subtyping,
    realize_type,
)


class Extension(ABC):
    name: str = ""

    def parse_declarations(self, ts: TokenStream) -> Declarations:
        """Consume the declarations this extension understands (default: none)."""
        return Declarations()

    @abstractmethod
    def parse_type(self, ts: TokenStream) -> TypeRef:
        ...

    def starts_type(self, ts: TokenStream) -> bool:
        return ts.current.kind == IDENT

    @abstractmethod
    def build_type_system(self, spec: Specification) -> tuple[GroundTypeSystem, list[Diagnostic]]:
        ...

    @abstractmethod
    def resolve_type(self, ref: TypeRef, system: GroundTypeSystem, decls: Declarations) -> Optional[GroundType]:
        ...

    def realize(self, t: GroundType, decls: Declarations, imported: Iterable[str] | None = None) -> str:
        """Spelling of ``t`` in generated code; ``imported`` lists names the header imports."""
        return t.name

    def imports_for(self, types: Iterable[GroundType], decls: Declarations) -> list[str]:
        return []


_QUALIFIED = re.compile(r"\b(?:[a-z_][A-Za-z0-9_]*\.)+[A-Z][A-Za-z0-9_]*")


class DeclarativeExtension(Extension):
    name = "declarative"

    def __init__(self, desc: TypeSystemDesc | None = None, language: LanguageDesc | None = None):
        self.desc = desc
        self.language = language

    def parse_type(self, ts: TokenStream) -> TypeRef:
        tok = ts.expect_kind(IDENT, "a type name")
        return TypeRef(tok.text, tok.span)

    def build_type_system(self, spec):
        if self.desc is None:
            raise DiagnosticError([Diagnostic(E_TYPE_UNKNOWN, "No type system description given")])
        return close_subtyping(self.desc), []

    def resolve_type(self, ref, system, decls):
        return system.type_named(ref.text)

    def realize(self, t, decls, imported=None):
        return realize_type(self.language, t)

    def imports_for(self, types, decls):
        found: dict[str, None] = {}
        for t in types:
            for m in _QUALIFIED.findall(self.realize(t, decls)):
                found.setdefault(m, None)
        return [q for q in found if not q.startswith("java.lang.") or q.count(".") > 2]


# Class table of the imports extension: qualified name -> direct supertypes.
JAVA_CORE: dict[str, tuple[str, ...]] = {
    "java.lang.Object": (),
    "java.lang.CharSequence": ("java.lang.Object",),
    "java.lang.String": ("java.lang.CharSequence",),
    "java.lang.Number": ("java.lang.Object",),
    "java.lang.Integer": ("java.lang.Number",),
    "java.lang.Long": ("java.lang.Number",),
    "java.lang.Double": ("java.lang.Number",),
    "java.lang.Boolean": ("java.lang.Object",),
    "java.lang.Character": ("java.lang.Object",),
    "java.util.Collection": ("java.lang.Object",),
    "java.util.List": ("java.util.Collection",),
    "java.util.ArrayList": ("java.util.List",),
    "java.util.Map": ("java.lang.Object",),
    "java.util.HashMap": ("java.util.Map",),
}


class ImportsExtension(Extension):
    """Dotted class names with ``import`` resolution and nominal subtyping."""

    name = "imports"
    TOP = "java.lang.Object"
    STRING = "java.lang.String"

    def __init__(self, classes: dict[str, tuple[str, ...]] | None = None):
        self.classes = dict(JAVA_CORE if classes is None else classes)

    def parse_declarations(self, ts: TokenStream) -> Declarations:
        start = ts.current.span
        options: list[tuple[str, str]] = []
        imports: list[str] = []
        if ts.current.kind == DIRECTIVE and ts.current.text == "#javaoptions":
            ts.advance()
            ts.expect_punct("{")
            while True:
                key = ts.expect_kind(IDENT, "an option name").text
                ts.expect_punct("=")
                value = ts.expect_kind(STRING, "a quoted option value").text
                ts.expect_punct(";")
                options.append((key, value))
                if ts.accept_punct("}"):
                    break
        while ts.current.is_word("import") and ts.peek().kind == IDENT:
            ts.advance()
            parts = [ts.expect_kind(IDENT, "a package or class name").text]
            while ts.accept_punct("."):
                if ts.accept_punct("*"):
                    parts.append("*")
                    break
                parts.append(ts.expect_kind(IDENT, "a package or class name").text)
            ts.expect_punct(";")
            imports.append(".".join(parts))
        return Declarations(tuple(imports), tuple(options), start)

    def parse_type(self, ts: TokenStream) -> TypeRef:
        first = ts.expect_kind(IDENT, "a type name")
        parts = [first.text]
        while ts.current.is_punct(".") and ts.peek().kind == IDENT:
            ts.advance()
            parts.append(ts.advance().text)
        return TypeRef(".".join(parts), first.span)

    def qualify(self, name: str, decls: Declarations) -> Optional[str]:
        if "." in name:
            return name
        for imp in decls.imports:
            if imp.rsplit(".", 1)[-1] == name:
                return imp
        for imp in decls.imports:
            if imp.endswith(".*") and f"{imp[:-2]}.{name}" in self.classes:
                return f"{imp[:-2]}.{name}"
        if f"java.lang.{name}" in self.classes:
            return f"java.lang.{name}"
        return None

    def _refs(self, spec: Specification):
        for sig in list(spec.externals) + list(spec.functions):
            decls = sig.inputs + sig.outputs + getattr(sig, "locals", ())
            for d in decls:
                if d.type is not None:
                    yield d.type

    def build_type_system(self, spec):
        classes = dict(self.classes)
        for ref in self._refs(spec):
            q = self.qualify(ref.text, spec.declarations)
            if q is not None and q not in classes:
                classes[q] = (self.TOP,)
        desc = TypeSystemDesc(
            name="imports",
            string_name=self.STRING,
            top_name=self.TOP,
            declared_types=tuple(classes),
            declared_subtypings=tuple((c, s) for c, sups in classes.items() for s in sups),
        )
        return close_subtyping(desc), []

    def resolve_type(self, ref, system, decls):
        q = self.qualify(ref.text, decls)
        return None if q is None else system.type_named(q)

    def realize(self, t, decls, imported=None):
        simple = t.name.rsplit(".", 1)[-1]
        if t.name.startswith("java.lang.") and t.name.count(".") == 2:
            return simple
        if imported is None:
            imported = self.imports_for([t], decls)
        return simple if t.name in set(imported) else t.name

    def imports_for(self, types, decls):
        out: dict[str, None] = {}
        simple_owner: dict[str, str] = {}
        for t in types:
            if t.name.startswith("java.lang.") and t.name.count(".") == 2:
                continue
            simple = t.name.rsplit(".", 1)[-1]
            # A clashing short name keeps its fully qualified spelling.
            if simple_owner.setdefault(simple, t.name) == t.name:
                out.setdefault(t.name, None)
        return list(out)


_REGISTRY: dict[str, Callable[..., Extension]] = {}


def register_extension(name: str, factory: Callable[..., Extension]) -> None:
    _REGISTRY[name] = factory


def get_extension(name: str, **kwargs) -> Extension:
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown extension {name!r}; known: {sorted(_REGISTRY)}") from None
    return factory(**kwargs)


def registered_extensions() -> list[str]:
    return sorted(_REGISTRY)


register_extension(DeclarativeExtension.name, DeclarativeExtension)
register_extension(ImportsExtension.name, ImportsExtension)

__all__ = [
    "DeclarativeExtension",
    "Extension",
    "ImportsExtension",
    "JAVA_CORE",
    "ParseAbort",
    "get_extension",
    "register_extension",
    "registered_extensions",
]
