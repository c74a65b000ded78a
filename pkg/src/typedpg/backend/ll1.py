"""FIRST/FOLLOW sets over rule right-hand sides and the LL(1) decision check."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..diagnostics import E_NOT_LL1, Diagnostic, DiagnosticError
from ..grammar import Alt, CharRange, GrammarModel, Iter, Labeled, Opt, Seq, Symbol, SymRef

EOF = Symbol("<EOF>", "eof")


class NotLL1Error(DiagnosticError):
    pass


def _terminal(sym: Symbol) -> bool:
    return sym.is_token


@dataclass
class LL1Analysis:
    grammar: GrammarModel
    start: str
    nullable_rules: dict = field(default_factory=dict)
    first_rules: dict = field(default_factory=dict)
    follow_rules: dict = field(default_factory=dict)
    node_follow: dict = field(default_factory=dict)  # (rule, path) -> frozenset

    def nullable(self, node) -> bool:
        if isinstance(node, SymRef):
            s = node.symbol
            return False if _terminal(s) else self.nullable_rules.get(s.name, False)
        if isinstance(node, CharRange):
            return False
        if isinstance(node, Seq):
            return all(self.nullable(c) for c in node.children)
        if isinstance(node, Alt):
            return any(self.nullable(c) for c in node.children)
        if isinstance(node, (Opt,)):
            return True
        if isinstance(node, Iter):
            return node.min == 0 or self.nullable(node.child)
        if isinstance(node, Labeled):
            return self.nullable(node.child)
        raise TypeError(node)

    def first(self, node) -> frozenset:
        if isinstance(node, SymRef):
            s = node.symbol
            return frozenset([s]) if _terminal(s) else self.first_rules.get(s.name, frozenset())
        if isinstance(node, CharRange):
            return frozenset()
        if isinstance(node, Seq):
            out: set = set()
            for c in node.children:
                out |= self.first(c)
                if not self.nullable(c):
                    break
            return frozenset(out)
        if isinstance(node, Alt):
            return frozenset().union(*(self.first(c) for c in node.children))
        if isinstance(node, (Opt, Iter, Labeled)):
            return self.first(node.child)
        raise TypeError(node)

    def follow(self, rule: str, path: tuple) -> frozenset:
        return self.node_follow.get((rule, path), frozenset())

    # fixpoints

    def compute(self) -> "LL1Analysis":
        rules = self.grammar.syntactic_rules
        changed = True
        while changed:
            changed = False
            for r in rules:
                n, f = self.nullable(r.rhs), self.first(r.rhs)
                if n != self.nullable_rules.get(r.name, False) or f != self.first_rules.get(r.name, frozenset()):
                    self.nullable_rules[r.name], self.first_rules[r.name] = n, f
                    changed = True
        self.follow_rules = {r.name: frozenset() for r in rules}
        self.follow_rules[self.start] = frozenset([EOF])
        changed = True
        while changed:
            changed = False
            for r in rules:
                self.node_follow = {k: v for k, v in self.node_follow.items() if k[0] != r.name}
                self._propagate(r.name, r.rhs, (), self.follow_rules[r.name])
                for (owner, path), fol in list(self.node_follow.items()):
                    if owner != r.name:
                        continue
                    node = _node(r.rhs, path)
                    if isinstance(node, SymRef) and node.symbol.name in self.follow_rules and not _terminal(node.symbol):
                        old = self.follow_rules[node.symbol.name]
                        if not fol <= old:
                            self.follow_rules[node.symbol.name] = old | fol
                            changed = True
        return self

    def _propagate(self, rule: str, node, path: tuple, follow: frozenset) -> None:
        self.node_follow[(rule, path)] = follow
        if isinstance(node, Seq):
            kids = node.children
            for i, c in enumerate(kids):
                after: set = set()
                nullable_rest = True
                for d in kids[i + 1 :]:
                    after |= self.first(d)
                    if not self.nullable(d):
                        nullable_rest = False
                        break
                self._propagate(rule, c, path + (i,), frozenset(after | (follow if nullable_rest else set())))
        elif isinstance(node, Alt):
            for i, c in enumerate(node.children):
                self._propagate(rule, c, path + (i,), follow)
        elif isinstance(node, Iter):
            self._propagate(rule, node.child, path + (0,), follow | self.first(node.child))
        elif isinstance(node, (Opt, Labeled)):
            self._propagate(rule, node.child, path + (0,), follow)


def _node(rhs, path):
    for i in path:
        rhs = (rhs.children if isinstance(rhs, (Seq, Alt)) else (rhs.child,))[i]
    return rhs


def _show(symbols) -> str:
    return ", ".join(sorted(s.name if not s.is_literal else f"'{s.name}'" for s in symbols))


def ll1_conflicts(grammar: GrammarModel, start: str) -> list[Diagnostic]:
    """One diagnostic per decision point that one token of lookahead can not resolve."""
    a = LL1Analysis(grammar, start).compute()
    diags: list[Diagnostic] = []
    for r in grammar.syntactic_rules:
        stack = [(r.rhs, ())]
        while stack:
            node, path = stack.pop()
            follow = a.follow(r.name, path)
            if isinstance(node, Alt):
                seen: set = set()
                nullable_count = 0
                for c in node.children:
                    f = a.first(c)
                    clash = seen & f
                    if clash:
                        diags.append(_conflict(r.name, node, f"alternatives share {_show(clash)}"))
                    seen |= f
                    if a.nullable(c):
                        nullable_count += 1
                if nullable_count > 1:
                    diags.append(_conflict(r.name, node, "more than one alternative can be empty"))
                elif nullable_count == 1 and seen & follow:
                    diags.append(_conflict(r.name, node, f"an empty alternative clashes on {_show(seen & follow)}"))
            elif isinstance(node, (Opt, Iter)):
                f = a.first(node.child)
                if a.nullable(node.child):
                    diags.append(_conflict(r.name, node, "the repeated or optional phrase can be empty"))
                elif f & follow:
                    diags.append(_conflict(r.name, node, f"the phrase and what follows share {_show(f & follow)}"))
            if isinstance(node, (Seq, Alt)):
                stack.extend((c, path + (i,)) for i, c in enumerate(node.children))
            elif isinstance(node, (Opt, Iter, Labeled)):
                stack.append((node.child, path + (0,)))
    if a.nullable_rules.get(start) is None and grammar.rule(start) is None:
        diags.append(Diagnostic(E_NOT_LL1, f"Unknown start rule {start}"))
    return diags


def _conflict(rule: str, node, detail: str) -> Diagnostic:
    return Diagnostic(E_NOT_LL1, f"Rule {rule} is not LL(1): {detail}", node.span)


def check_ll1(grammar: GrammarModel, start: str) -> LL1Analysis:
    diags = ll1_conflicts(grammar, start)
    if diags:
        raise NotLL1Error(diags)
    return LL1Analysis(grammar, start).compute()
