"""Artifact generation from checked specifications."""

from .emitter import (
    UnsupportedConstruct,
    emit_antlr_grammar,
    emit_external_interface,
    emit_files,
    make_plan,
)
from .naming import RESERVED, EmissionPlan, fresh_name, is_reserved, plan_names

__all__ = [
    "RESERVED",
    "EmissionPlan",
    "UnsupportedConstruct",
    "emit_antlr_grammar",
    "emit_external_interface",
    "emit_files",
    "fresh_name",
    "is_reserved",
    "make_plan",
    "plan_names",
]
