"""Identifier hygiene for generated ANTLR/Java text."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from ..typesystem import BackendProfile

JAVA_KEYWORDS = frozenset(
    """abstract assert boolean break byte case catch char class const continue default do double
    else enum extends final finally float for goto if implements import instanceof int interface
    long native new package private protected public return short static strictfp super switch
    synchronized this throw throws transient try void volatile while true false null var record
    yield""".split()
)

ANTLR_KEYWORDS = frozenset(
    """grammar lexer parser tree fragment returns scope options tokens catch finally throws
    protected public private import init after header members rule EOF DOWN UP EOR INVALID
    EOR_TOKEN_TYPE MIN_TOKEN_TYPE""".split()
)

# Members of ANTLR3 generated recognizers that user names would shadow.
RECOGNIZER_MEMBERS = frozenset(
    """input state retval adaptor match recover reset emit skip nextToken mismatch
    getTokenNames getGrammarFileName traceIn traceOut reportError displayRecognitionError
    tokenNames""".split()
)

INTERNAL_PREFIXES = ("tpg_", "TPG_")

RESERVED = JAVA_KEYWORDS | ANTLR_KEYWORDS | RECOGNIZER_MEMBERS


def is_reserved(name: str, extra: Iterable[str] = ()) -> bool:
    return name in RESERVED or name.startswith(INTERNAL_PREFIXES) or name in set(extra)


@dataclass
class EmissionPlan:
    """Renaming and import decisions shared by every emitted file."""

    profile: Optional[BackendProfile] = None
    renames: dict = field(default_factory=dict)  # original -> emitted identifier
    imports: list = field(default_factory=list)  # qualified names, first-seen order

    def name(self, original: str) -> str:
        return self.renames.get(original, original)

    def add_import(self, qualified: str) -> None:
        if qualified not in self.imports:
            self.imports.append(qualified)


def fresh_name(plan: EmissionPlan, requested: str, reserved: Iterable[str] = ()) -> str:
    """Return a name for ``requested`` that is neither reserved nor taken.

    A name already planned is returned unchanged, so calls are idempotent.
    Otherwise the smallest positive suffix making the name free is appended.
    """
    if requested in plan.renames:
        return plan.renames[requested]
    reserved = set(reserved)
    taken = set(plan.renames.values())

    def free(candidate: str) -> bool:
        return candidate not in reserved and candidate not in taken and not is_reserved(candidate)

    # A suffix can not repair an internal prefix, so such names get a new stem.
    stem = "user_" + requested if requested.startswith(INTERNAL_PREFIXES) else requested
    candidate = stem
    i = 0
    while not free(candidate):
        i += 1
        candidate = f"{stem}{i}"
    plan.renames[requested] = candidate
    return candidate


def plan_names(identifiers: Iterable[str], profile: Optional[BackendProfile] = None) -> EmissionPlan:
    """Build a plan covering ``identifiers``.

    Free identifiers keep their spelling and are planned first, so a fresh
    name can never steal an identifier the specification already uses.
    """
    plan = EmissionPlan(profile)
    ordered = list(dict.fromkeys(identifiers))
    kept = [n for n in ordered if not is_reserved(n)]
    for n in kept:
        plan.renames[n] = n
    for n in ordered:
        if n not in plan.renames:
            fresh_name(plan, n, kept)
    return plan
