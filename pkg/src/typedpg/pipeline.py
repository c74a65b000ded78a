"""Front-end driver: parse, resolve names, type check and infer, then check initialization."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .dataflow import Cfg, build_cfg, check_definite_assignment
from .diagnostics import Diagnostic, DiagnosticError, sort_diagnostics
from .extensions import DeclarativeExtension, Extension
from .frontend import parse_specification, site_diagnostics
from .grammar import validate_grammar
from .gts import TypeSystemFile, parse_type_system_file
from .model import ExternalSignature, Specification, TranslationFunction
from .typechecker import FunctionSig, FunctionTypes, TypeContext, build_context, check_translation_function
from .typesystem import BackendProfile, GroundTypeSystem, LanguageDesc


@dataclass
class CheckedSpec:
    """A specification together with everything the front-end derived from it.

    Back-ends consume this object; it is only complete when ``diagnostics``
    holds no errors.
    """

    spec: Specification
    extension: Extension
    system: Optional[GroundTypeSystem] = None
    context: Optional[TypeContext] = None
    function_types: dict = field(default_factory=dict)  # function name -> FunctionTypes
    inferred_externals: list = field(default_factory=list)
    cfgs: dict = field(default_factory=dict)  # function name -> Cfg
    diagnostics: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not any(d.is_error for d in self.diagnostics)

    @property
    def signatures(self) -> dict[str, FunctionSig]:
        return self.context.functions if self.context is not None else {}

    @property
    def externals(self) -> list[ExternalSignature]:
        """Declared external signatures followed by inferred ones, in name order."""
        return list(self.spec.externals) + sorted(self.inferred_externals, key=lambda s: s.name)

    def attribute_type(self, function: str, attribute: str):
        return self.function_types[function].attributes.get(attribute)


def _check_function(
    checked: CheckedSpec, ctx: TypeContext, f: TranslationFunction, owner_diags: list[Diagnostic]
) -> list[Diagnostic]:
    spec = checked.spec
    rule = spec.grammar.rule(f.rule)
    names = list(owner_diags) + site_diagnostics(spec, f)
    if rule is None or names:
        return names
    result: FunctionTypes = check_translation_function(ctx, f)
    checked.function_types[f.name] = result
    checked.inferred_externals.extend(result.inferred_externals)
    if result.diagnostics:
        return result.diagnostics
    cfg: Cfg = build_cfg(rule, f)
    checked.cfgs[f.name] = cfg
    return check_definite_assignment(cfg, f)


def analyze(
    text: str,
    extension: Extension | None = None,
    file: str = "<input>",
) -> CheckedSpec:
    """Run every front-end phase over a specification text.

    Phases run in a fixed order per translation function: name resolution,
    type checking with inference, then definite assignment. A function that
    fails a phase skips the later ones; other functions are still checked.
    Syntax errors stop everything and are returned alone.
    """
    extension = extension or DeclarativeExtension()
    try:
        spec = parse_specification(text, file=file, extension=extension)
    except DiagnosticError as e:
        return CheckedSpec(Specification(file=file), extension, diagnostics=sort_diagnostics(e.diagnostics))
    checked = CheckedSpec(spec, extension)
    diags = validate_grammar(spec.grammar)
    try:
        system, sys_diags = extension.build_type_system(spec)
    except DiagnosticError as e:
        checked.diagnostics = sort_diagnostics(diags + e.diagnostics)
        return checked
    diags += sys_diags
    checked.system = system
    ctx, owned = build_context(spec, system, extension)
    checked.context = ctx
    for ext in spec.externals:
        diags += owned.get(ext.name, [])
    for f in spec.functions:
        diags += _check_function(checked, ctx, f, owned.pop(f.name, []))
    checked.diagnostics = sort_diagnostics(diags)
    return checked


def load_type_system_file(path: str | Path) -> TypeSystemFile:
    path = Path(path)
    return parse_type_system_file(path.read_text(encoding="utf-8"), str(path))


def declarative_extension(
    gts: TypeSystemFile, profile: BackendProfile | str | None = None
) -> tuple[DeclarativeExtension, Optional[BackendProfile]]:
    """Pick the type system and language for ``profile`` (or the first ones)."""
    if profile is None and gts.profiles:
        profile = gts.profiles[0]
    if isinstance(profile, str):
        found = gts.profile(profile)
        if found is None:
            raise KeyError(f"unknown back-end profile {profile!r}")
        profile = found
    language: Optional[LanguageDesc] = None
    if profile is not None:
        language = gts.language(profile.language)
    elif gts.languages:
        language = gts.languages[0]
    if language is not None:
        desc = gts.type_system(language.type_system)
    else:
        desc = gts.type_systems[0] if gts.type_systems else None
    return DeclarativeExtension(desc, language), profile


def analyze_files(
    spec_path: str | Path, typesystem_path: str | Path, profile: str | None = None
) -> tuple[CheckedSpec, Optional[BackendProfile]]:
    gts = load_type_system_file(typesystem_path)
    ext, prof = declarative_extension(gts, profile)
    spec_path = Path(spec_path)
    return analyze(spec_path.read_text(encoding="utf-8"), ext, str(spec_path)), prof
