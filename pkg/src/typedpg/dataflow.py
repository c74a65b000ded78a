"""Control-flow graphs of translation functions and definite-assignment analysis.

Branching and repetition come only from the grammar rule: a sequence runs
its parts in order, an alternative branches, an iteration loops, and an
optional phrase is an alternative with an empty option. Actions become
nodes placed around the phrase they are attached to; the edge entering a
node carries the attribute reads and writes performed to reach it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .diagnostics import E_FLOW_OUTPUT, E_FLOW_UNINIT, NO_SPAN, Diagnostic, Span, sort_diagnostics
from .grammar import Alt, CharRange, Iter, Labeled, Occurrence, Opt, Rule, Seq, SymRef, node_at, resolve_action_site
from .model import AFTER, AT, BEFORE, Assign, AttrRef, Block, Call, CallStmt, PositionedAction, TranslationFunction

ENTRY, EXIT, MATCH, ACTION, BRANCH, JOIN, LOOP_HEAD = (
    "entry",
    "exit",
    "match",
    "action",
    "branch",
    "join",
    "loop-head",
)
READ, WRITE = "r", "w"


@dataclass(frozen=True)
class Access:
    name: str
    mode: str
    span: Span = field(default=NO_SPAN, compare=False)

    def __str__(self) -> str:
        return f"{self.name}[{self.mode}]"


@dataclass
class CfgNode:
    id: int
    kind: str
    occurrence: Optional[Occurrence] = None
    action: Optional[PositionedAction] = None

    def label(self) -> str:
        if self.occurrence is not None:
            return f"{self.kind} {self.occurrence.name}"
        if self.action is not None:
            return f"{self.kind} {self.action.position} {self.action.site}"
        return self.kind


@dataclass
class CfgEdge:
    src: int
    dst: int
    accesses: tuple = ()


@dataclass
class Cfg:
    nodes: list = field(default_factory=list)
    edges: list = field(default_factory=list)
    entry: int = 0
    exit: int = 0

    def add_node(self, kind: str, **payload) -> int:
        node = CfgNode(len(self.nodes), kind, **payload)
        self.nodes.append(node)
        return node.id

    def add_edge(self, src: int, dst: int, accesses=()) -> None:
        self.edges.append(CfgEdge(src, dst, tuple(accesses)))

    def successors(self, n: int) -> list[int]:
        return [e.dst for e in self.edges if e.src == n]

    def predecessors(self, n: int) -> list[int]:
        return [e.src for e in self.edges if e.dst == n]

    def incoming(self, n: int) -> list[CfgEdge]:
        return [e for e in self.edges if e.dst == n]

    def outgoing(self, n: int) -> list[CfgEdge]:
        return [e for e in self.edges if e.src == n]

    def kinds(self) -> list[str]:
        return [n.kind for n in self.nodes]

    def to_dot(self, name: str = "cfg") -> str:
        lines = [f'digraph "{name}" {{', "  node [shape=box];"]
        for n in self.nodes:
            lines.append(f'  n{n.id} [label="{_dot_escape(n.label())}"];')
        for e in self.edges:
            label = " ".join(map(str, e.accesses))
            attr = f' [label="{_dot_escape(label)}"]' if label else ""
            lines.append(f"  n{e.src} -> n{e.dst}{attr};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


# -- accesses -----------------------------------------------------------------


def _expression_reads(e, out: list) -> None:
    if isinstance(e, AttrRef):
        out.append(Access(e.name, READ, e.span))
    elif isinstance(e, Call):
        for a in e.args:
            _expression_reads(a, out)


def statement_accesses(s) -> list[Access]:
    """Reads of the right-hand side, then writes of the targets left to right."""
    out: list[Access] = []
    if isinstance(s, Block):
        for sub in s.statements:
            out.extend(statement_accesses(sub))
    elif isinstance(s, CallStmt):
        _expression_reads(s.call, out)
    elif isinstance(s, Assign):
        _expression_reads(s.rhs, out)
        spans = s.target_spans or (s.span,) * len(s.targets)
        out.extend(Access(t, WRITE, sp) for t, sp in zip(s.targets, spans))
    return out


# -- construction ---------------------------------------------------------------


@dataclass
class _Attached:
    before: list = field(default_factory=list)
    after: list = field(default_factory=list)
    at: Optional[PositionedAction] = None


def attach_actions(rule: Rule, f: TranslationFunction) -> dict[tuple, _Attached]:
    """Map rhs paths to the actions executed there, in textual order.

    'at' actions are attached to the symbol occurrence itself even when the
    site is a label wrapping it.
    """
    table: dict[tuple, _Attached] = {}
    for action in f.actions:
        for occ in resolve_action_site(rule, action.site, action.span):
            path = occ.path
            if action.position == AT:
                node = node_at(rule.rhs, path)
                while isinstance(node, Labeled):
                    node = node.child
                    path = path + (0,)
            slot = table.setdefault(path, _Attached())
            if action.position == BEFORE:
                slot.before.append(action)
            elif action.position == AFTER:
                slot.after.append(action)
            elif slot.at is None:
                slot.at = action
    return table


def build_cfg(rule: Rule, f: TranslationFunction) -> Cfg:
    """Control-flow graph of ``f`` over the right-hand side of ``rule``."""
    cfg = Cfg()
    table = attach_actions(rule, f)
    cfg.entry = cfg.add_node(ENTRY)

    def step(cur: int, kind: str, accesses=(), **payload) -> int:
        n = cfg.add_node(kind, **payload)
        cfg.add_edge(cur, n, accesses)
        return n

    def actions(cur: int, acts) -> int:
        for a in acts:
            cur = step(cur, ACTION, statement_accesses(a.body), action=a)
        return cur

    def build(node, path: tuple, cur: int) -> int:
        slot = table.get(path, _Attached())
        if isinstance(node, (SymRef, CharRange)):
            cur = actions(cur, slot.before)
            name = node.symbol.name if isinstance(node, SymRef) else f"{node.lo}..{node.hi}"
            accesses = statement_accesses(slot.at.body) if slot.at is not None else ()
            cur = step(cur, MATCH, accesses, occurrence=Occurrence(rule.name, path, name))
            return actions(cur, slot.after)
        if isinstance(node, Labeled):
            cur = actions(cur, slot.before)
            cur = build(node.child, path + (0,), cur)
            return actions(cur, slot.after)
        if isinstance(node, Seq):
            for i, child in enumerate(node.children):
                cur = build(child, path + (i,), cur)
            return cur
        if isinstance(node, (Alt, Opt)):
            branch = step(cur, BRANCH)
            if isinstance(node, Alt):
                ends = [build(c, path + (i,), branch) for i, c in enumerate(node.children)]
            else:
                ends = [build(node.child, path + (0,), branch), branch]
            join = cfg.add_node(JOIN)
            for end in ends:
                cfg.add_edge(end, join)
            return join
        if isinstance(node, Iter):
            head = step(cur, LOOP_HEAD)
            end = build(node.child, path + (0,), head)
            if node.min == 0:
                cfg.add_edge(end, head)
                return head
            tail = step(end, BRANCH)
            cfg.add_edge(tail, head)
            return tail
        raise TypeError(node)

    last = build(rule.rhs, (), cfg.entry)
    cfg.exit = cfg.add_node(EXIT)
    cfg.add_edge(last, cfg.exit)
    return cfg


# -- definite assignment ----------------------------------------------------------


def _transfer(state: frozenset, edge: CfgEdge) -> frozenset:
    writes = {a.name for a in edge.accesses if a.mode == WRITE}
    return state | writes if writes else state


def assigned_before(cfg: Cfg, initial: set[str]) -> dict[int, frozenset]:
    """Attributes definitely assigned on entry to each node (forward must-analysis)."""
    universe = frozenset(initial) | {a.name for e in cfg.edges for a in e.accesses}
    state = {n.id: universe for n in cfg.nodes}
    state[cfg.entry] = frozenset(initial)
    incoming = {n.id: cfg.incoming(n.id) for n in cfg.nodes}
    work = [n.id for n in cfg.nodes]
    while work:
        n = work.pop(0)
        if n == cfg.entry:
            continue
        ins = [_transfer(state[e.src], e) for e in incoming[n]]
        new = frozenset.intersection(*ins) if ins else universe  # unreachable: no constraint
        if new != state[n]:
            state[n] = new
            for e in cfg.outgoing(n):
                if e.dst not in work:
                    work.append(e.dst)
    return state


def uninitialized_reads(cfg: Cfg, initial: set[str]) -> list[tuple[int, int]]:
    """``(edge index, access index)`` of every read that may precede all writes."""
    state = assigned_before(cfg, initial)
    found = []
    for ei, edge in enumerate(cfg.edges):
        assigned = set(state[edge.src])
        for ai, acc in enumerate(edge.accesses):
            if acc.mode == READ and acc.name not in assigned:
                found.append((ei, ai))
            elif acc.mode == WRITE:
                assigned.add(acc.name)
    return found


def uninit_message(name: str) -> str:
    return f"The local attribute {name} might have not been initialized"


def check_definite_assignment(cfg: Cfg, f: TranslationFunction) -> list[Diagnostic]:
    """Report reads of possibly unassigned attributes and outputs left unassigned."""
    inputs = {d.name for d in f.inputs}
    diags: dict[tuple, Diagnostic] = {}
    for ei, ai in uninitialized_reads(cfg, inputs):
        acc = cfg.edges[ei].accesses[ai]
        diags.setdefault((acc.name, acc.span), Diagnostic(E_FLOW_UNINIT, uninit_message(acc.name), acc.span))
    at_exit = assigned_before(cfg, inputs)[cfg.exit]
    out = list(diags.values())
    for d in f.outputs:
        if d.name not in at_exit:
            out.append(
                Diagnostic(E_FLOW_OUTPUT, f"The output attribute {d.name} might have not been initialized", f.span)
            )
    return sort_diagnostics(out)
