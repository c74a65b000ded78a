"""Type checking and local type inference for translation functions.

Checking a function walks its action statements, typing expressions with
the usual rules (token text is a string, an attribute has its declared
type, a call yields its callee's output tuple) and requiring every value
to be a subtype of the slot it flows into. Subtyping requirements between
two ground types are verified on the spot; requirements involving an
undeclared attribute or an inferred external signature become
:class:`Constraint` objects handed to :func:`solve_constraints`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .diagnostics import (
    E_ARITY,
    E_AT,
    E_DUPLICATE,
    E_NAME,
    E_TUPLE_ARITY,
    E_TYPE_AMBIG,
    E_TYPE_INCOMPAT,
    E_TYPE_NOTOP,
    E_TYPE_UNKNOWN,
    NO_SPAN,
    Diagnostic,
    DiagnosticError,
    Span,
)
from .extensions import Extension
from .grammar import GrammarModel, Labeled, SymRef, UnknownSiteError, node_at, resolve_action_site
from .model import (
    AT,
    DECLARED,
    INFERRED,
    INPUT,
    LOCAL,
    OUTPUT,
    Assign,
    AttrRef,
    AttributeDecl,
    Block,
    Call,
    CallStmt,
    ExternalSignature,
    Specification,
    TokenText,
    TranslationFunction,
    TypeRef,
    expression_calls,
)
from .typesystem import GroundType, GroundTypeSystem, TupleType

TRANSLATION, EXTERNAL = "translation", "external"


@dataclass(frozen=True)
class TypeVar:
    id: int
    name: str
    origin: Span = field(default=NO_SPAN, compare=False)

    def __str__(self) -> str:
        return f"?{self.name}"


Slot = Union[GroundType, TypeVar, None]  # None: unresolved declared type, checks skipped


@dataclass(frozen=True)
class Constraint:
    """``lower`` must be a subtype of ``upper``."""

    lower: Union[GroundType, TypeVar]
    upper: Union[GroundType, TypeVar]
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass
class FunctionSig:
    name: str
    inputs: list  # [(attribute name, Slot)]
    outputs: list
    kind: str
    rule: Optional[str] = None
    origin: str = DECLARED
    span: Span = NO_SPAN

    @property
    def input_types(self) -> list:
        return [t for _, t in self.inputs]

    @property
    def output_types(self) -> list:
        return [t for _, t in self.outputs]

    def is_ground(self) -> bool:
        return all(isinstance(t, GroundType) for t in self.input_types + self.output_types)


@dataclass
class TypeContext:
    """Signatures of every function plus the attributes of each, keyed by owner."""

    system: GroundTypeSystem
    grammar: GrammarModel = field(default_factory=GrammarModel)
    functions: dict = field(default_factory=dict)  # name -> FunctionSig
    attributes: dict = field(default_factory=dict)  # (owner, attribute) -> Slot
    active: Optional[str] = None
    _ids: itertools.count = field(default_factory=itertools.count)

    def fresh(self, name: str, origin: Span = NO_SPAN) -> TypeVar:
        return TypeVar(next(self._ids), name, origin)

    def attribute(self, name: str):
        return self.attributes.get((self.active, name), _MISSING)


_MISSING = object()


class InferenceError(DiagnosticError):
    pass


def _incompatible(lower, upper, span) -> Diagnostic:
    return Diagnostic(E_TYPE_INCOMPAT, f"Incompatible types: {lower} and {upper}", span)


# -- context construction ---------------------------------------------------


def build_context(
    spec: Specification, system: GroundTypeSystem, extension: Extension
) -> tuple[TypeContext, dict[str, list[Diagnostic]]]:
    """Resolve every signature of ``spec``; diagnostics are keyed by owning function."""
    ctx = TypeContext(system, spec.grammar)
    diags: dict[str, list[Diagnostic]] = {}

    def resolve(ref: Optional[TypeRef], owner: str) -> Slot:
        if ref is None:
            return None
        t = extension.resolve_type(ref, system, spec.declarations)
        if t is None:
            diags.setdefault(owner, []).append(Diagnostic(E_TYPE_UNKNOWN, f"Unknown type {ref.text}", ref.span))
        return t

    def attrs(decls, owner):
        return [(d.name, resolve(d.type, owner)) for d in decls]

    for sig in list(spec.externals) + list(spec.functions):
        is_tf = isinstance(sig, TranslationFunction)
        if sig.name in ctx.functions:
            diags.setdefault(sig.name, []).append(
                Diagnostic(E_DUPLICATE, f"Duplicate function {sig.name}", sig.span)
            )
            continue
        ctx.functions[sig.name] = FunctionSig(
            sig.name,
            attrs(sig.inputs, sig.name),
            attrs(sig.outputs, sig.name),
            TRANSLATION if is_tf else EXTERNAL,
            sig.rule if is_tf else None,
            DECLARED,
            sig.span,
        )
    for f in spec.functions:
        if ctx.functions.get(f.name) is None or ctx.functions[f.name].span != f.span:
            continue
        seen: set[str] = set()
        for d in f.attributes():
            if d.name in seen:
                diags.setdefault(f.name, []).append(
                    Diagnostic(E_DUPLICATE, f"Duplicate attribute {d.name} in {f.name}", d.span)
                )
                continue
            seen.add(d.name)
            t = resolve(d.type, f.name) if d.role == LOCAL else dict(
                ctx.functions[f.name].inputs + ctx.functions[f.name].outputs
            )[d.name]
            ctx.attributes[(f.name, d.name)] = t
    return ctx, diags


# -- expressions and statements ---------------------------------------------


class _FunctionChecker:
    def __init__(self, ctx: TypeContext, f: TranslationFunction):
        self.ctx = ctx
        self.f = f
        self.constraints: list[Constraint] = []
        self.diags: list[Diagnostic] = []
        self.vars: list[TypeVar] = []
        self.inferred_locals: dict[str, TypeVar] = {}
        self.skeletons: dict[str, FunctionSig] = {}
        rule = ctx.grammar.rule(f.rule)
        self.tokens = set()
        if rule is not None:
            self.tokens = {n.symbol.name for _, n in rule.symbol_refs() if n.symbol.kind == "token-rule"}

    def require(self, lower, upper, span) -> None:
        if lower is None or upper is None:
            return
        if isinstance(lower, GroundType) and isinstance(upper, GroundType):
            if not self.ctx.system.is_subtype(lower, upper):
                self.diags.append(_incompatible(lower, upper, span))
        else:
            self.constraints.append(Constraint(lower, upper, span))

    def attribute(self, name: str, span: Span) -> Slot:
        t = self.ctx.attribute(name)
        if t is _MISSING:
            v = self.ctx.fresh(name, span)
            self.vars.append(v)
            self.inferred_locals[name] = v
            self.ctx.attributes[(self.f.name, name)] = v
            return v
        return t

    def skeleton(self, call: Call, n_outputs: int) -> FunctionSig:
        def var(label):
            v = self.ctx.fresh(f"{call.function}.{label}", call.span)
            self.vars.append(v)
            return v

        ins = [(f"arg{i + 1}", var(f"arg{i + 1}")) for i in range(len(call.args))]
        names = ["result"] if n_outputs == 1 else [f"result{i + 1}" for i in range(n_outputs)]
        outs = [(n, var(n)) for n in names]
        sig = FunctionSig(call.function, ins, outs, EXTERNAL, None, INFERRED, call.span)
        self.skeletons[call.function] = sig
        self.ctx.functions[call.function] = sig
        return sig

    def expression(self, e, n_outputs: int = 1):
        """Type of ``e``: a slot for single values, a list for tuples of other arity."""
        if isinstance(e, TokenText):
            if e.token not in self.tokens:
                self.diags.append(Diagnostic(E_NAME, f"Unknown token {e.token} in rule {self.f.rule}", e.span))
            return self.ctx.system.string_type
        if isinstance(e, AttrRef):
            return self.attribute(e.name, e.span)
        sig = self.ctx.functions.get(e.function)
        if sig is None:
            sig = self.skeleton(e, n_outputs)
        if len(e.args) != len(sig.inputs):
            self.diags.append(
                Diagnostic(
                    E_ARITY,
                    f"Function {e.function} expects {len(sig.inputs)} argument(s) but got {len(e.args)}",
                    e.span,
                )
            )
        for arg, (_, param) in zip(e.args, sig.inputs):
            t = self.expression(arg)
            if isinstance(t, list):
                self.diags.append(
                    Diagnostic(E_TUPLE_ARITY, "A tuple can not be passed as a single argument", arg.span)
                )
                continue
            self.require(t, param, arg.span)
        outs = sig.output_types
        return outs[0] if len(outs) == 1 else list(outs)

    def statement(self, s) -> None:
        if isinstance(s, Block):
            for sub in s.statements:
                self.statement(sub)
            return
        if isinstance(s, CallStmt):
            self.expression(s.call, n_outputs=0)
            return
        n = len(s.targets)
        if len(set(s.targets)) != n:
            self.diags.append(Diagnostic(E_NAME, "Tuple components must be distinct attributes", s.span))
        rhs = self.expression(s.rhs, n_outputs=n)
        spans = s.target_spans or (s.span,) * n
        targets = [self.attribute(name, sp) for name, sp in zip(s.targets, spans)]
        if not s.is_tuple:
            if isinstance(rhs, list):
                self.diags.append(
                    Diagnostic(
                        E_TUPLE_ARITY,
                        f"A tuple of {len(rhs)} values can not be assigned to the single attribute {s.targets[0]}",
                        s.span,
                    )
                )
                return
            self.require(rhs, targets[0], s.rhs.span)
            return
        if not isinstance(rhs, list) or len(rhs) != n:
            got = len(rhs) if isinstance(rhs, list) else 1
            self.diags.append(
                Diagnostic(E_TUPLE_ARITY, f"A tuple of {n} attributes can not receive {got} value(s)", s.span)
            )
            return
        for r, t in zip(rhs, targets):
            self.require(r, t, s.rhs.span)

    def actions(self) -> None:
        rule = self.ctx.grammar.rule(self.f.rule)
        at_owner: dict[tuple, object] = {}
        for action in self.f.actions:
            if action.position == AT and rule is not None:
                self.check_at(rule, action, at_owner)
            else:
                for call in statement_calls_of(action.body):
                    sig = self.ctx.functions.get(call.function)
                    if sig is not None and sig.kind == TRANSLATION:
                        self.diags.append(
                            Diagnostic(
                                E_AT,
                                f"Translation function {call.function} can only be called in an 'at' action",
                                call.span,
                            )
                        )
            self.statement(action.body)
        if rule is not None:
            self.implicit_calls(rule, at_owner)

    def implicit_calls(self, rule, at_owner) -> None:
        """A nonterminal without an 'at' action needs a callee taking no inputs."""
        for path, ref in rule.symbol_refs():
            if not ref.symbol.is_nonterminal or path in at_owner:
                continue
            tfs = [s for s in self.ctx.functions.values() if s.kind == TRANSLATION and s.rule == ref.symbol.name]
            if tfs and not any(not s.inputs for s in tfs):
                self.diags.append(
                    Diagnostic(
                        E_AT,
                        f"Occurrence of {ref.symbol.name} needs an 'at' action to pass inputs to its translation function",
                        ref.span,
                    )
                )

    def check_at(self, rule, action, at_owner) -> None:
        call = action.at_call()
        try:
            occs = resolve_action_site(rule, action.site, action.span)
        except UnknownSiteError:
            return
        for occ in occs:
            node = node_at(rule.rhs, occ.path)
            while isinstance(node, Labeled):
                node = node.child
            if not isinstance(node, SymRef) or not node.symbol.is_nonterminal:
                self.diags.append(
                    Diagnostic(E_AT, f"'at' actions apply only to nonterminal occurrences, not {action.site}", action.span)
                )
                continue
            key = _symref_path(rule.rhs, occ.path)
            if key in at_owner:
                self.diags.append(
                    Diagnostic(E_AT, f"More than one 'at' action for the same occurrence of {node.symbol.name}", action.span)
                )
            at_owner[key] = action
            if call is None:
                continue
            sig = self.ctx.functions.get(call.function)
            if sig is None or sig.kind != TRANSLATION or sig.rule != node.symbol.name:
                self.diags.append(
                    Diagnostic(
                        E_AT,
                        f"'at {action.site}' must call a translation function of rule {node.symbol.name}",
                        call.span,
                    )
                )


def _symref_path(rhs, path):
    node = node_at(rhs, path)
    while isinstance(node, Labeled):
        path = path + (0,)
        node = node.child
    return path


def statement_calls_of(stmt):
    if isinstance(stmt, Block):
        for s in stmt.statements:
            yield from statement_calls_of(s)
    else:
        yield from expression_calls(stmt.rhs if isinstance(stmt, Assign) else stmt.call)


def type_of_expression(ctx: TypeContext, e) -> tuple[object, list[Constraint], list[Diagnostic]]:
    """Type ``e`` in the active function of ``ctx``.

    Returns the type (ground type, type variable or :class:`TupleType`), the
    constraints collected along the way and any diagnostics.
    """
    checker = _FunctionChecker(ctx, TranslationFunction(ctx.active or "", ""))
    checker.tokens = _AnyToken()
    t = checker.expression(e)
    if isinstance(t, list):
        t = TupleType(tuple(t)) if all(isinstance(c, GroundType) for c in t) else tuple(t)
    return t, checker.constraints, checker.diags


class _AnyToken:
    def __contains__(self, item) -> bool:
        return True


def check_statement(ctx: TypeContext, s) -> list[Constraint]:
    """Check one statement; returns its constraints or raises :class:`DiagnosticError`."""
    checker = _FunctionChecker(ctx, TranslationFunction(ctx.active or "", ""))
    checker.tokens = _AnyToken()
    checker.statement(s)
    if checker.diags:
        raise DiagnosticError(checker.diags)
    return checker.constraints


# -- constraint solving -------------------------------------------------------


def _components(vars_: list[TypeVar], cs: list[Constraint]) -> list[list[TypeVar]]:
    parent = {v: v for v in vars_}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for c in cs:
        if isinstance(c.lower, TypeVar) and isinstance(c.upper, TypeVar):
            a, b = find(c.lower), find(c.upper)
            if a != b:
                parent[max(a, b, key=lambda v: v.id)] = min(a, b, key=lambda v: v.id)
    groups: dict[TypeVar, list[TypeVar]] = {}
    for v in vars_:
        groups.setdefault(find(v), []).append(v)
    return [sorted(g, key=lambda v: v.id) for g in groups.values()]


class _Component:
    def __init__(self, sys: GroundTypeSystem, vars_: list[TypeVar], cs: list[Constraint]):
        self.sys = sys
        self.vars = vars_
        members = set(vars_)
        self.cs = [c for c in cs if c.lower in members or c.upper in members]
        self.var_edges = [(c.lower, c.upper) for c in self.cs if isinstance(c.lower, TypeVar) and isinstance(c.upper, TypeVar)]

    def has_ground(self) -> bool:
        return any(isinstance(c.lower, GroundType) or isinstance(c.upper, GroundType) for c in self.cs)

    def lower_bounded(self) -> list[TypeVar]:
        """Variables with a ground lower bound, directly or through other variables."""
        found = {c.upper for c in self.cs if isinstance(c.lower, GroundType)}
        changed = True
        while changed:
            changed = False
            for lo, hi in self.var_edges:
                if lo in found and hi not in found:
                    found.add(hi)
                    changed = True
        return [v for v in self.vars if v in found]

    def tightened_domains(self) -> dict[TypeVar, list[GroundType]]:
        """Unary filtering by ground bounds, then arc consistency on var-var edges."""
        sub = self.sys.is_subtype
        dom = {v: list(self.sys.predefined_types) for v in self.vars}
        for c in self.cs:
            if isinstance(c.lower, GroundType):
                dom[c.upper] = [t for t in dom[c.upper] if sub(c.lower, t)]
            elif isinstance(c.upper, GroundType):
                dom[c.lower] = [t for t in dom[c.lower] if sub(t, c.upper)]
        changed = True
        while changed:
            changed = False
            for lo, hi in self.var_edges:
                new_lo = [a for a in dom[lo] if any(sub(a, b) for b in dom[hi])]
                new_hi = [b for b in dom[hi] if any(sub(a, b) for a in new_lo)]
                if len(new_lo) != len(dom[lo]) or len(new_hi) != len(dom[hi]):
                    dom[lo], dom[hi] = new_lo, new_hi
                    changed = True
        return dom

    def solutions(self, dom) -> list[dict[TypeVar, GroundType]]:
        sub = self.sys.is_subtype
        order = sorted(self.vars, key=lambda v: (len(dom[v]), v.id))
        out: list[dict] = []
        assignment: dict[TypeVar, GroundType] = {}

        def consistent(v) -> bool:
            t = assignment[v]
            for lo, hi in self.var_edges:
                if lo == v and hi in assignment and not sub(t, assignment[hi]):
                    return False
                if hi == v and lo in assignment and not sub(assignment[lo], t):
                    return False
            return True

        def search(i):
            if i == len(order):
                out.append(dict(assignment))
                return
            v = order[i]
            for t in dom[v]:
                assignment[v] = t
                if consistent(v):
                    search(i + 1)
                del assignment[v]

        search(0)
        return out

    def witness(self) -> Optional[tuple[GroundType, GroundType, Span]]:
        """A ground lower/upper pair that is connected through variables but incompatible."""
        lowers = {v: [] for v in self.vars}
        uppers = {v: [] for v in self.vars}
        for c in self.cs:
            if isinstance(c.lower, GroundType):
                lowers[c.upper].append((c.lower, c.span))
            elif isinstance(c.upper, GroundType):
                uppers[c.lower].append((c.upper, c.span))
        changed = True
        while changed:
            changed = False
            for lo, hi in self.var_edges:
                for g in lowers[lo]:
                    if g not in lowers[hi]:
                        lowers[hi].append(g)
                        changed = True
                for g in uppers[hi]:
                    if g not in uppers[lo]:
                        uppers[lo].append(g)
                        changed = True
        for v in self.vars:
            for (g, _), (h, span) in itertools.product(lowers[v], uppers[v]):
                if not self.sys.is_subtype(g, h):
                    return g, h, span
        return None


def _pareto(sys: GroundTypeSystem, vectors: list[tuple], minimal: bool) -> list[tuple]:
    def leq(a, b):
        return all(sys.is_subtype(x, y) for x, y in zip(a, b))

    out = []
    for a in vectors:
        dominated = any(b != a and (leq(b, a) if minimal else leq(a, b)) for b in vectors)
        if not dominated:
            out.append(a)
    return out


def solve_constraints(
    sys: GroundTypeSystem, vars_: Iterable[TypeVar], cs: Iterable[Constraint]
) -> dict[TypeVar, GroundType]:
    """Assign a ground type to every variable, preferring lower bounds.

    Variables bounded from below by a ground type (directly or through other
    variables) take the least types compatible with all constraints; the
    remaining variables then take the greatest types below their upper
    bounds. Variables connected to no ground type at all get the top type.
    Raises :class:`InferenceError`
    carrying ``E-TYPE-INCOMPAT`` (unsatisfiable), ``E-TYPE-AMBIG`` (several
    incomparable candidates) or ``E-TYPE-NOTOP`` diagnostics.

    Candidates are enumerated over the finite set of predefined types after
    bound tightening, per connected component of the constraint graph.
    """
    vars_ = sorted(set(vars_), key=lambda v: v.id)
    cs = list(cs)
    for c in cs:
        for side in (c.lower, c.upper):
            if isinstance(side, TypeVar) and side not in vars_:
                vars_.append(side)
    result: dict[TypeVar, GroundType] = {}
    diags: list[Diagnostic] = []
    for group in _components(vars_, cs):
        comp = _Component(sys, group, cs)
        names = ", ".join(v.name for v in group)
        span = group[0].origin
        if not comp.has_ground():
            if sys.top_type is None:
                diags.append(
                    Diagnostic(
                        E_TYPE_NOTOP,
                        f"Can not infer a type for {names}: no constraints and no top type",
                        span,
                    )
                )
            else:
                result.update({v: sys.top_type for v in group})
            continue
        sols = comp.solutions(comp.tightened_domains())
        if not sols:
            w = comp.witness()
            if w is not None:
                diags.append(_incompatible(w[0], w[1], w[2] if w[2] != NO_SPAN else span))
            else:
                diags.append(
                    Diagnostic(E_TYPE_INCOMPAT, f"Incompatible types: no type satisfies the constraints on {names}", span)
                )
            continue
        lower_bounded = comp.lower_bounded()
        rest = [v for v in group if v not in lower_bounded]
        best_low = _pareto(sys, list(dict.fromkeys(tuple(s[v] for v in lower_bounded) for s in sols)), True)
        if len(best_low) > 1:
            diags.append(_ambiguous(lower_bounded, best_low, span))
            continue
        sols = [s for s in sols if tuple(s[v] for v in lower_bounded) == best_low[0]]
        best_high = _pareto(sys, list(dict.fromkeys(tuple(s[v] for v in rest) for s in sols)), False)
        if len(best_high) > 1:
            diags.append(_ambiguous(rest, best_high, span))
            continue
        result.update(zip(lower_bounded, best_low[0]))
        result.update(zip(rest, best_high[0]))
    if diags:
        raise InferenceError(diags)
    return result


def _ambiguous(vars_, candidates, span) -> Diagnostic:
    def show(vec):
        return vec[0].name if len(vec) == 1 else "(" + ", ".join(t.name for t in vec) + ")"

    names = ", ".join(v.name for v in vars_)
    options = " and ".join(show(c) for c in candidates[:2])
    return Diagnostic(
        E_TYPE_AMBIG,
        f"Can not infer a type for {names}: {options} are incomparable; declare it explicitly",
        span,
    )


# -- whole functions ---------------------------------------------------------


@dataclass
class FunctionTypes:
    """Outcome of checking one translation function."""

    function: str
    attributes: dict = field(default_factory=dict)  # name -> GroundType
    inferred_locals: list = field(default_factory=list)
    inferred_externals: list = field(default_factory=list)  # ExternalSignature
    diagnostics: list = field(default_factory=list)


def check_translation_function(ctx: TypeContext, f: TranslationFunction) -> FunctionTypes:
    """Check ``f`` and infer the types of its undeclared attributes.

    Inferred external signatures are registered in ``ctx`` so that later
    functions see them fully typed. Checking continues past errors.
    """
    ctx.active = f.name
    checker = _FunctionChecker(ctx, f)
    checker.actions()
    out = FunctionTypes(f.name)
    out.diagnostics.extend(checker.diags)
    try:
        solution = solve_constraints(ctx.system, checker.vars, checker.constraints)
    except InferenceError as e:
        out.diagnostics.extend(e.diagnostics)
        solution = None
    if solution is not None:
        for name, v in checker.inferred_locals.items():
            ctx.attributes[(f.name, name)] = solution[v]
            out.inferred_locals.append(name)
        for name, sig in checker.skeletons.items():
            sig.inputs = [(n, solution[v]) for n, v in sig.inputs]
            sig.outputs = [(n, solution[v]) for n, v in sig.outputs]
            out.inferred_externals.append(
                ExternalSignature(
                    name,
                    tuple(AttributeDecl(n, TypeRef(t.name), INPUT) for n, t in sig.inputs),
                    tuple(AttributeDecl(n, TypeRef(t.name), OUTPUT) for n, t in sig.outputs),
                    INFERRED,
                    sig.span,
                )
            )
    else:
        # Unsolved skeletons must not leak variables into later functions.
        for name in checker.skeletons:
            ctx.functions.pop(name, None)
    for d in f.attributes():
        out.attributes[d.name] = ctx.attributes.get((f.name, d.name))
    for name in checker.inferred_locals:
        t = ctx.attributes.get((f.name, name))
        out.attributes[name] = t if isinstance(t, GroundType) else None
    return out
