"""ANTLR3 grammar and Java interface text for a checked specification."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from ..dataflow import attach_actions
from ..grammar import Alt, CharRange, Iter, Labeled, Opt, Rule, Seq, SymRef, quote_literal
from ..model import (
    INFERRED,
    Assign,
    AttrRef,
    Block,
    Call,
    CallStmt,
    ExternalSignature,
    TokenText,
    TranslationFunction,
    TypeRef,
)
from ..pipeline import CheckedSpec
from ..typesystem import BackendProfile, GroundType, LanguageDesc, realize_type
from .naming import EmissionPlan, fresh_name, plan_names

EXTERNALS_FIELD = "tpg_externals"
WS_RULE = "TPG_WS"
INDENT = "    "

_PRIMITIVE_DEFAULTS = {
    "int": "0",
    "long": "0L",
    "short": "0",
    "byte": "0",
    "double": "0.0",
    "float": "0.0f",
    "char": "'\\0'",
    "boolean": "false",
}
_KNOWN_OPTIONS = ("package", "parserName")


class UnsupportedConstruct(Exception):
    """The emitter met a tree shape it can not place in the output."""


def default_value(java_type: str) -> str:
    return _PRIMITIVE_DEFAULTS.get(java_type.strip(), "null")


def parser_name(profile: Optional[BackendProfile]) -> str:
    return (profile.option("parserName") if profile else None) or "Translator"


def interface_name(profile: Optional[BackendProfile]) -> str:
    return parser_name(profile) + "Externals"


def carrier_name(function: str) -> str:
    return function[:1].upper() + function[1:] + "Result"


def carrier_field(i: int) -> str:
    return f"field{i + 1}"


# -- planning ------------------------------------------------------------------


def spec_identifiers(checked: CheckedSpec) -> list[str]:
    """Every identifier of the specification that can reach the output, in textual order."""
    spec = checked.spec
    names: list[str] = []
    for ext in checked.externals:
        names.append(ext.name)
        names.extend(d.name for d in ext.inputs + ext.outputs)
    for rule in spec.grammar.rules:
        names.append(rule.name)
        for f in spec.functions_for(rule.name):
            names.append(f.name)
            names.extend(d.name for d in f.attributes())
            ft = checked.function_types.get(f.name)
            if ft is not None:
                names.extend(ft.attributes)
    return names


def make_plan(checked: CheckedSpec, profile: Optional[BackendProfile] = None) -> EmissionPlan:
    plan = plan_names(spec_identifiers(checked), profile)
    for f in checked.spec.functions:
        secondary = _emitted_rule_key(checked, f)
        if secondary != f.rule:
            plan_names_into(plan, [secondary])
    for rule in checked.spec.grammar.syntactic_rules:
        tfs = checked.spec.functions_for(rule.name)
        if tfs and all(f.inputs for f in tfs):
            plan_names_into(plan, [plain_rule_key(rule.name)])
    types = [t for t in _all_types(checked) if t is not None]
    for q in checked.extension.imports_for(types, checked.spec.declarations):
        plan.add_import(q)
    return plan


def plan_names_into(plan: EmissionPlan, names: Iterable[str]) -> None:
    for n in names:
        fresh_name(plan, n)


def plain_rule_key(rule: str) -> str:
    """Planned name of an action-free copy of a rule whose functions all take inputs."""
    return f"{rule}_plain"


def _emitted_rule_key(checked: CheckedSpec, f: TranslationFunction) -> str:
    """The identifier an emitted rule for ``f`` is planned under."""
    return f.rule if _designated(checked, f.rule) is f else f"{f.rule}_{f.name}"


def _designated(checked: CheckedSpec, rule: str) -> Optional[TranslationFunction]:
    tfs = checked.spec.functions_for(rule)
    for f in tfs:
        if f.name == rule:
            return f
    return tfs[0] if tfs else None


def _all_types(checked: CheckedSpec) -> list:
    out: list = []
    for sig in checked.signatures.values():
        out.extend(sig.input_types + sig.output_types)
    for ft in checked.function_types.values():
        out.extend(ft.attributes.values())
    return [t for t in dict.fromkeys(out) if isinstance(t, GroundType)]


# -- grammar text --------------------------------------------------------------


@dataclass
class _Text:
    text: str
    atomic: bool = False


class _Act(list):
    """Statements of one inline action block."""


class _RuleEmitter:
    def __init__(self, checked: CheckedSpec, plan: EmissionPlan, rule: Rule, f: Optional[TranslationFunction]):
        self.checked = checked
        self.plan = plan
        self.rule = rule
        self.f = f
        self.table = attach_actions(rule, f) if f is not None else {}
        self.labels = 0
        self.temps = 0
        self.plain_needed: set[str] = set()
        self.plain = False
        self.types = checked.function_types[f.name].attributes if f is not None else {}
        self.params = {d.name for d in f.inputs + f.outputs} if f is not None else set()

    # names and types

    def realize(self, t) -> str:
        if t is None:
            raise UnsupportedConstruct(f"untyped attribute in {self.rule.name}")
        return self.checked.extension.realize(t, self.checked.spec.declarations, self.plan.imports)

    def attr(self, name: str) -> str:
        n = self.plan.name(name)
        return "$" + n if name in self.params else n

    # expressions and statements

    def expression(self, e) -> str:
        if isinstance(e, AttrRef):
            return self.attr(e.name)
        if isinstance(e, TokenText):
            return f"$tpg_{e.token}.text"
        args = ", ".join(self.expression(a) for a in e.args)
        return f"{EXTERNALS_FIELD}.{self.plan.name(e.function)}({args})"

    def statements(self, s) -> list[str]:
        if isinstance(s, Block):
            return [line for sub in s.statements for line in self.statements(sub)]
        if isinstance(s, CallStmt):
            return [self.expression(s.call) + ";"]
        if not s.is_tuple:
            return [f"{self.attr(s.targets[0])} = {self.expression(s.rhs)};"]
        call = s.rhs
        if not isinstance(call, Call):
            raise UnsupportedConstruct("tuple assignment from a non-call")
        self.temps += 1
        tmp = f"tpg_t{self.temps}"
        carrier = f"{interface_name(self.plan.profile)}.{carrier_name(self.plan.name(call.function))}"
        out = [f"{carrier} {tmp} = {self.expression(call)};"]
        out += [f"{self.attr(t)} = {tmp}.{carrier_field(i)};" for i, t in enumerate(s.targets)]
        return out

    def actions(self, acts) -> list:
        return [_Act(self.statements(a.body)) for a in acts]

    # right-hand sides

    def callee(self, name: str, at) -> tuple[str, list]:
        """Text invoking nonterminal ``name`` plus the actions storing its results."""
        if at is None:
            tfs = self.checked.spec.functions_for(name)
            if not tfs:
                return self.plan.name(name), []
            target = next((g for g in tfs if not g.inputs), None)
            if target is not None:
                return self.plan.name(_emitted_rule_key(self.checked, target)), []
            if self.f is not None:
                raise UnsupportedConstruct(f"occurrence of {name} needs an 'at' action")
            self.plain_needed.add(name)
            return self.plan.name(plain_rule_key(name)), []
        body = at.body
        call = at.at_call()
        target = self.checked.spec.function(call.function)
        rule_name = self.plan.name(_emitted_rule_key(self.checked, target))
        args = ", ".join(self.expression(a) for a in call.args)
        invocation = f"{rule_name}[{args}]" if call.args else rule_name
        if isinstance(body, CallStmt):
            return invocation, []
        self.labels += 1
        label = f"tpg_r{self.labels}"
        outs = [d.name for d in target.outputs]
        stmts = [f"{self.attr(t)} = ${label}.{self.plan.name(o)};" for t, o in zip(body.targets, outs)]
        return f"{label}={invocation}", [_Act(stmts)]

    def pieces(self, node, path: tuple) -> list:
        slot = self.table.get(path)
        before = self.actions(slot.before) if slot else []
        after = self.actions(slot.after) if slot else []
        if isinstance(node, SymRef):
            sym = node.symbol
            if sym.is_literal:
                core, extra = quote_literal(sym.name), []
            elif sym.is_token:
                name = self.plan.name(sym.name)
                core, extra = (f"tpg_{sym.name}={name}" if sym.name in self._token_texts() else name), []
            else:
                core, extra = self.callee(sym.name, slot.at if slot else None)
            return before + [_Text(core, True)] + extra + after
        if isinstance(node, CharRange):
            return before + [_Text(f"{quote_literal(node.lo)}..{quote_literal(node.hi)}", True)] + after
        if isinstance(node, Labeled):
            return before + self.pieces(node.child, path + (0,)) + after
        if isinstance(node, Seq):
            return [p for i, c in enumerate(node.children) for p in self.pieces(c, path + (i,))]
        if isinstance(node, Alt):
            alts = " | ".join(self.join(self.pieces(c, path + (i,))) for i, c in enumerate(node.children))
            return [_Text(f"({alts})", True)]
        if isinstance(node, (Iter, Opt)):
            suffix = "?" if isinstance(node, Opt) else ("*" if node.min == 0 else "+")
            inner = self.pieces(node.child, path + (0,))
            if len(inner) == 1 and isinstance(inner[0], _Text) and inner[0].atomic:
                text = inner[0].text
            else:
                text = f"({self.join(inner)})"
            return [_Text(text + suffix)]
        raise UnsupportedConstruct(type(node).__name__)

    def _token_texts(self) -> set[str]:
        if not hasattr(self, "_texts"):
            self._texts = set()
            if self.f is not None:
                for a in self.f.actions:
                    self._texts |= _token_text_names(a.body)
        return self._texts

    @staticmethod
    def join(pieces: list) -> str:
        merged: list = []
        for p in pieces:
            if isinstance(p, _Act) and merged and isinstance(merged[-1], _Act):
                merged[-1] = _Act(merged[-1] + p)
            else:
                merged.append(p)
        out = []
        for p in merged:
            if isinstance(p, _Act):
                out.append("{" + " ".join(p) + "}")
            else:
                out.append(p.text)
        return " ".join(out)

    def body(self) -> list[str]:
        """Top-level alternatives, one per output line."""
        rhs, path = self.rule.rhs, ()
        while isinstance(rhs, Labeled) and path not in self.table:
            rhs, path = rhs.child, path + (0,)
        if isinstance(rhs, Alt):
            return [self.join(self.pieces(c, path + (i,))) for i, c in enumerate(rhs.children)]
        return [self.join(self.pieces(self.rule.rhs, ()))]

    def header(self) -> list[str]:
        if self.f is None:
            key = plain_rule_key(self.rule.name) if self.plain else self.rule.name
            return [self.plan.name(key)]
        name = self.plan.name(_emitted_rule_key(self.checked, self.f))
        ins = ", ".join(f"{self.realize(self.types[d.name])} {self.plan.name(d.name)}" for d in self.f.inputs)
        outs = ", ".join(f"{self.realize(self.types[d.name])} {self.plan.name(d.name)}" for d in self.f.outputs)
        line = name + (f"[{ins}]" if ins else "") + (f" returns [{outs}]" if outs else "")
        lines = [line]
        local_names = [n for n in self.types if n not in self.params]
        if local_names:
            lines.append("@init {")
            for n in local_names:
                java = self.realize(self.types[n])
                lines.append(f"{INDENT}{java} {self.plan.name(n)} = {default_value(java)};")
            lines.append("}")
        return lines

    def emit(self) -> str:
        prefix = "fragment " if self.rule.is_fragment else ""
        head = self.header()
        head[0] = prefix + head[0]
        alts = self.body()
        lines = head + [f"{INDENT}: {alts[0]}"] + [f"{INDENT}| {a}" for a in alts[1:]] + [f"{INDENT};"]
        return "\n".join(lines)


def _token_text_names(s) -> set[str]:
    out: set[str] = set()

    def expr(e):
        if isinstance(e, TokenText):
            out.add(e.token)
        elif isinstance(e, Call):
            for a in e.args:
                expr(a)

    def stmt(s):
        if isinstance(s, Block):
            for sub in s.statements:
                stmt(sub)
        elif isinstance(s, Assign):
            expr(s.rhs)
        elif isinstance(s, CallStmt):
            expr(s.call)

    stmt(s)
    return out


def _header_blocks(plan: EmissionPlan) -> list[str]:
    profile = plan.profile
    package = profile.option("package") if profile else None
    lines: list[str] = []
    if profile is not None:
        for k, v in profile.options:
            if k not in _KNOWN_OPTIONS:
                lines.append(f"// option {k} = '{v}'")
        if lines:
            lines.append("")
    head = ([f"package {package};"] if package else []) + (
        ([""] if package and plan.imports else []) + [f"import {q};" for q in plan.imports]
    )
    if head:
        lines += ["@header {"] + head + ["}", ""]
    if package:
        lines += ["@lexer::header {", f"package {package};", "}", ""]
    return lines


def emit_antlr_grammar(checked: CheckedSpec, plan: Optional[EmissionPlan] = None) -> str:
    """ANTLR3 grammar text with one rule per translation function.

    Requires a specification without error diagnostics.
    """
    if not checked.ok:
        raise ValueError("refusing to emit a specification with errors")
    plan = plan or make_plan(checked)
    name = parser_name(plan.profile)
    lines = [f"grammar {name};", ""]
    lines += _header_blocks(plan)
    has_actions = bool(checked.spec.functions)
    if has_actions:
        iface = interface_name(plan.profile)
        lines += [
            "@members {",
            f"private {iface} {EXTERNALS_FIELD};",
            "",
            f"public {name}Parser(TokenStream input, {iface} externals) {{",
            f"{INDENT}this(input);",
            f"{INDENT}this.{EXTERNALS_FIELD} = externals;",
            "}",
            "}",
            "",
        ]
    lines.append("")
    blocks = []
    grammar = checked.spec.grammar
    pending: list[str] = []
    for rule in grammar.syntactic_rules:
        tfs = checked.spec.functions_for(rule.name)
        for f in tfs or [None]:
            emitter = _RuleEmitter(checked, plan, rule, f)
            blocks.append(emitter.emit())
            pending += sorted(emitter.plain_needed)
    done: set[str] = set()
    while pending:
        name = pending.pop(0)
        if name in done:
            continue
        done.add(name)
        emitter = _RuleEmitter(checked, plan, grammar.rule(name), None)
        emitter.plain = True
        blocks.append(emitter.emit())
        pending += sorted(emitter.plain_needed)
    for rule in grammar.token_rules:
        blocks.append(_RuleEmitter(checked, plan, rule, None).emit())
    blocks.append(
        f"// Whitespace separating tokens.\n{WS_RULE} : (' ' | '\\t' | '\\r' | '\\n')+ {{$channel = HIDDEN;}} ;"
    )
    return "\n".join(lines) + "\n\n".join(blocks) + "\n"


# -- externals interface ---------------------------------------------------------


def emit_external_interface(
    signatures: list[ExternalSignature],
    language: Optional[LanguageDesc] = None,
    profile: Optional[BackendProfile] = None,
    plan: Optional[EmissionPlan] = None,
    realize: Optional[Callable[[str], str]] = None,
    imports: Iterable[str] = (),
) -> str:
    """Java interface with one method per external function.

    Types are realized through ``realize`` (type name to text) or, failing
    that, through ``language``. Functions with several outputs return a
    nested carrier class with numbered fields.
    """
    plan = plan or plan_names(
        [n for s in signatures for n in [s.name] + [d.name for d in s.inputs + s.outputs]], profile
    )
    spell = realize or (lambda name: realize_type(language, GroundType(name)))
    profile = profile or plan.profile
    package = profile.option("package") if profile else None
    lines: list[str] = []
    if package:
        lines += [f"package {package};", ""]
    imports = list(imports) or list(plan.imports)
    if imports:
        lines += [f"import {q};" for q in imports] + [""]
    lines.append(f"public interface {interface_name(profile)} {{")
    carriers: list[str] = []
    for sig in signatures:
        name = plan.name(sig.name)
        params = ", ".join(f"{spell(d.type.text)} {plan.name(d.name)}" for d in sig.inputs)
        if not sig.outputs:
            ret = "void"
        elif len(sig.outputs) == 1:
            ret = spell(sig.outputs[0].type.text)
        else:
            ret = carrier_name(name)
            carriers += _carrier(ret, [spell(d.type.text) for d in sig.outputs])
        if sig.origin == INFERRED:
            lines.append(f"{INDENT}// inferred")
        lines.append(f"{INDENT}{ret} {name}({params});")
    if carriers:
        lines += [""] + carriers
    lines.append("}")
    return "\n".join(lines) + "\n"


def _carrier(name: str, types: list[str]) -> list[str]:
    fields = [(t, carrier_field(i)) for i, t in enumerate(types)]
    params = ", ".join(f"{t} {f}" for t, f in fields)
    lines = [f"{INDENT}final class {name} {{"]
    lines += [f"{INDENT * 2}public final {t} {f};" for t, f in fields]
    lines += ["", f"{INDENT * 2}public {name}({params}) {{"]
    lines += [f"{INDENT * 3}this.{f} = {f};" for _, f in fields]
    lines += [f"{INDENT * 2}}}", f"{INDENT}}}"]
    return lines


def emit_files(checked: CheckedSpec, profile: Optional[BackendProfile] = None) -> dict[str, str]:
    """File name to text for the grammar and the externals interface."""
    plan = make_plan(checked, profile)
    ext = checked.extension
    decls = checked.spec.declarations
    system = checked.system

    def spell(type_name: str) -> str:
        t = ext.resolve_type(TypeRef(type_name), system, decls) or system.type_named(type_name)
        t = t or GroundType(type_name)
        return ext.realize(t, decls, plan.imports)

    name = parser_name(profile)
    return {
        f"{name}.g": emit_antlr_grammar(checked, plan),
        f"{interface_name(profile)}.java": emit_external_interface(
            checked.externals, profile=profile, plan=plan, realize=spell
        ),
    }
