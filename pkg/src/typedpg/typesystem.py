"""Ground types, tuple and function types, and subtyping.

A :class:`GroundTypeSystem` is the contract every front-end extension
realizes: a set of predefined ground types, a subtyping oracle, the string
type and an optional top type. :class:`FiniteTypeSystem` realizes it for
finite, explicitly enumerated type sets such as those read from ``.gts``
description files.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .diagnostics import E_CYCLE, E_TYPE_UNKNOWN, NO_SPAN, Diagnostic, DiagnosticError, Span


@dataclass(frozen=True, order=True)
class GroundType:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class TupleType:
    components: tuple = ()

    def __post_init__(self):
        for c in self.components:
            if not isinstance(c, GroundType):
                raise TypeError(f"tuple components must be ground types, got {c!r}")

    def __len__(self) -> int:
        return len(self.components)

    def __str__(self) -> str:
        return "(" + ", ".join(map(str, self.components)) + ")"


@dataclass(frozen=True)
class FunctionType:
    domain: TupleType
    codomain: TupleType

    def __str__(self) -> str:
        return f"{self.domain} -> {self.codomain}"


AttributeType = Union[GroundType, TupleType]


class GroundTypeSystem(ABC):
    """Extension contract for the ground types of one implementation language."""

    @abstractmethod
    def is_subtype(self, sub: GroundType, sup: GroundType) -> bool:
        """True iff ``sub`` is a subtype of ``sup``. Must be reflexive and transitive."""

    @property
    @abstractmethod
    def predefined_types(self) -> tuple[GroundType, ...]:
        ...

    @property
    @abstractmethod
    def string_type(self) -> GroundType:
        ...

    @property
    def top_type(self) -> Optional[GroundType]:
        return None

    def type_named(self, name: str) -> Optional[GroundType]:
        for t in self.predefined_types:
            if t.name == name:
                return t
        return None

    def minimal(self, types: Iterable[GroundType]) -> list[GroundType]:
        ts = list(types)
        return [t for t in ts if not any(u != t and self.is_subtype(u, t) for u in ts)]

    def maximal(self, types: Iterable[GroundType]) -> list[GroundType]:
        ts = list(types)
        return [t for t in ts if not any(u != t and self.is_subtype(t, u) for u in ts)]


class FiniteTypeSystem(GroundTypeSystem):
    """A finite ground type system backed by a closed boolean subtyping matrix."""

    def __init__(
        self,
        name: str,
        types: Sequence[GroundType],
        matrix: np.ndarray,
        string_type: GroundType,
        top_type: Optional[GroundType] = None,
    ):
        self.name = name
        self._types = tuple(types)
        self._index = {t: i for i, t in enumerate(self._types)}
        self._matrix = np.asarray(matrix, dtype=bool)
        self._matrix.setflags(write=False)
        self._string = string_type
        self._top = top_type

    @property
    def predefined_types(self) -> tuple[GroundType, ...]:
        return self._types

    @property
    def string_type(self) -> GroundType:
        return self._string

    @property
    def top_type(self) -> Optional[GroundType]:
        return self._top

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    def is_subtype(self, sub: GroundType, sup: GroundType) -> bool:
        i, j = self._index.get(sub), self._index.get(sup)
        if i is None or j is None:
            return sub == sup
        return bool(self._matrix[i, j])

    def __repr__(self) -> str:
        return f"FiniteTypeSystem({self.name!r}, {[t.name for t in self._types]})"


@dataclass(frozen=True)
class TypeSystemDesc:
    name: str
    string_name: str
    top_name: Optional[str] = None
    declared_types: tuple = ()
    declared_subtypings: tuple = ()  # (sub, super) name pairs
    span: Span = field(default=NO_SPAN, compare=False, repr=False)

    def all_type_names(self) -> list[str]:
        names = list(dict.fromkeys(self.declared_types))
        for extra in (self.string_name, self.top_name):
            if extra is not None and extra not in names:
                names.append(extra)
        return names


@dataclass(frozen=True)
class LanguageDesc:
    name: str
    type_system: str
    realizations: tuple = ()  # (type name, text) pairs
    span: Span = field(default=NO_SPAN, compare=False, repr=False)

    def realization(self, type_name: str) -> Optional[str]:
        for k, v in self.realizations:
            if k == type_name:
                return v
        return None


@dataclass(frozen=True)
class BackendProfile:
    backend_id: str
    language: str
    options: tuple = ()  # (key, value) pairs
    span: Span = field(default=NO_SPAN, compare=False, repr=False)

    def option(self, key: str, default: str | None = None) -> str | None:
        for k, v in self.options:
            if k == key:
                return v
        return default

    @property
    def short_name(self) -> str:
        return self.backend_id.rsplit(".", 1)[-1]


class CyclicSubtypingError(DiagnosticError):
    pass


def close_subtyping(desc: TypeSystemDesc) -> FiniteTypeSystem:
    """Build the reflexive-transitive closure of the declared subtyping pairs.

    Every type is additionally a subtype of the top type when one is named.
    Raises :class:`CyclicSubtypingError` if two distinct types end up mutual
    subtypes.
    """
    names = desc.all_type_names()
    index = {n: i for i, n in enumerate(names)}
    n = len(names)
    rel = np.eye(n, dtype=bool)
    unknown = []
    for sub, sup in desc.declared_subtypings:
        if sub not in index or sup not in index:
            missing = sub if sub not in index else sup
            unknown.append(Diagnostic(E_TYPE_UNKNOWN, f"Unknown type {missing} in subtyping rule", desc.span))
            continue
        rel[index[sub], index[sup]] = True
    if unknown:
        raise DiagnosticError(unknown)
    for k in range(n):
        rel |= np.outer(rel[:, k], rel[k, :])
    cyc = rel & rel.T & ~np.eye(n, dtype=bool)
    if cyc.any():
        i, j = map(int, np.argwhere(cyc)[0])
        raise CyclicSubtypingError(
            [
                Diagnostic(
                    E_CYCLE,
                    f"Cyclic subtyping between {names[i]} and {names[j]} in type system {desc.name}",
                    desc.span,
                )
            ]
        )
    top = None
    if desc.top_name is not None:
        rel[:, index[desc.top_name]] = True
        top = GroundType(desc.top_name)
    types = [GroundType(nm) for nm in names]
    return FiniteTypeSystem(desc.name, types, rel, GroundType(desc.string_name), top)


def extended_subtype(sys: GroundTypeSystem, a: AttributeType, b: AttributeType) -> bool:
    """Subtyping lifted componentwise to tuples of equal arity."""
    if isinstance(a, GroundType) and isinstance(b, GroundType):
        return sys.is_subtype(a, b)
    if isinstance(a, TupleType) and isinstance(b, TupleType):
        return len(a) == len(b) and all(
            sys.is_subtype(x, y) for x, y in zip(a.components, b.components)
        )
    return False


def realize_type(lang: Optional[LanguageDesc], t: GroundType) -> str:
    """Implementation-language spelling of ``t``; falls back to the type's own name."""
    if lang is not None:
        text = lang.realization(t.name)
        if text is not None:
            return text
    return t.name
