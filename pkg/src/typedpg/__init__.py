"""Typed parser-generator front-end with an ANTLR3 emitter and a direct interpreter."""

from .diagnostics import Diagnostic, DiagnosticError, Span, SpecSyntaxError
from .extensions import DeclarativeExtension, Extension, ImportsExtension, get_extension, register_extension
from .frontend import format_specification, parse_specification
from .gts import parse_type_system_file
from .pipeline import CheckedSpec, analyze, analyze_files, declarative_extension, load_type_system_file
from .typechecker import Constraint, TypeVar, solve_constraints
from .typesystem import FiniteTypeSystem, GroundType, TypeSystemDesc, close_subtyping

__all__ = [
    "CheckedSpec",
    "Constraint",
    "DeclarativeExtension",
    "Diagnostic",
    "DiagnosticError",
    "Extension",
    "FiniteTypeSystem",
    "GroundType",
    "ImportsExtension",
    "Span",
    "SpecSyntaxError",
    "TypeSystemDesc",
    "TypeVar",
    "analyze",
    "analyze_files",
    "close_subtyping",
    "declarative_extension",
    "format_specification",
    "get_extension",
    "load_type_system_file",
    "parse_specification",
    "parse_type_system_file",
    "register_extension",
    "solve_constraints",
]
