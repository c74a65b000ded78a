"""Independent reference implementations and generators shared by the test modules.

Everything here is deliberately naive: exhaustive enumeration, plain graph
search, explicit path walking. None of it reuses the code under test.
"""

from __future__ import annotations

import itertools

from hypothesis import strategies as st

from typedpg.dataflow import ACTION, WRITE, Access, Cfg
from typedpg.typechecker import Constraint, TypeVar
from typedpg.typesystem import GroundType, TypeSystemDesc, close_subtyping

G = GroundType


# -- subtyping ----------------------------------------------------------------------


def brute_closure(n, edges):
    """Reachability by depth-first search from every node."""
    adj = {i: {b for a, b in edges if a == i} for i in range(n)}
    out = set()
    for s in range(n):
        seen, stack = {s}, [s]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        out |= {(s, t) for t in seen}
    return out


@st.composite
def dags(draw, max_nodes=8):
    n = draw(st.integers(1, max_nodes))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))) if pairs else []
    perm = draw(st.permutations(range(n)))
    return n, [(perm[a], perm[b]) for a, b in edges]


# -- constraint solving ---------------------------------------------------------------


def finite_system(names, pairs, string=None, top=None):
    return close_subtyping(TypeSystemDesc("T", string or names[0], top, tuple(names), tuple(pairs)))


@st.composite
def constraint_problems(draw, max_types=6, max_vars=5, max_constraints=10):
    """A random finite type system plus variables and constraints over it."""
    n, edges = draw(dags(max_types))
    names = [f"T{i}" for i in range(n)]
    top = None
    if n > 1 and draw(st.booleans()):
        # the last type becomes the top; keep the order acyclic
        top = names[-1]
        edges = [(a, b) for a, b in edges if a != n - 1]
    sys = finite_system(names, [(names[a], names[b]) for a, b in edges], string=names[0], top=top)
    k = draw(st.integers(1, max_vars))
    vs = [TypeVar(i, f"v{i}") for i in range(k)]
    side = st.one_of(st.sampled_from(vs), st.sampled_from([G(x) for x in names]))
    cs = []
    for _ in range(draw(st.integers(0, max_constraints))):
        lo, hi = draw(side), draw(side)
        if isinstance(lo, GroundType) and isinstance(hi, GroundType):
            lo = draw(st.sampled_from(vs))
        cs.append(Constraint(lo, hi))
    return sys, vs, cs


def satisfies(sys, assignment, cs):
    def val(x):
        return assignment[x] if isinstance(x, TypeVar) else x

    return all(sys.is_subtype(val(c.lower), val(c.upper)) for c in cs)


def lower_bounded(vs, cs):
    """Variables reachable from a ground lower bound through variable-to-variable constraints."""
    found = {c.upper for c in cs if isinstance(c.lower, GroundType)}
    while True:
        more = {c.upper for c in cs if c.lower in found and isinstance(c.upper, TypeVar)} - found
        if not more:
            return [v for v in vs if v in found]
        found |= more


def all_solutions(sys, vs, cs):
    for combo in itertools.product(sys.predefined_types, repeat=len(vs)):
        a = dict(zip(vs, combo))
        if satisfies(sys, a, cs):
            yield a


def strictly_below_exists(sys, got, every, low):
    for other in every:
        below = all(sys.is_subtype(other[v], got[v]) for v in low)
        if below and any(other[v] != got[v] for v in low):
            return True
    return False


# -- data flow -------------------------------------------------------------------------

NAMES = ["p", "q", "r", "s"]


@st.composite
def random_cfgs(draw, max_nodes=12):
    n = draw(st.integers(2, max_nodes))
    cfg = Cfg()
    for _ in range(n):
        cfg.add_node(ACTION)
    cfg.entry, cfg.exit = 0, n - 1
    writes = st.lists(st.sampled_from(NAMES), max_size=2).map(lambda ns: [Access(x, WRITE) for x in ns])
    pairs = st.tuples(st.integers(0, n - 1), st.integers(1, n - 1))
    for src, dst in draw(st.lists(pairs, max_size=3 * n, unique=True)):
        cfg.add_edge(src, dst, draw(writes))
    initial = set(draw(st.lists(st.sampled_from(NAMES), max_size=1)))
    return cfg, initial


def path_meet(cfg, initial, max_visits=1):
    """Intersect the writes along every path from entry visiting no node more than ``max_visits`` times.

    Only reachable nodes appear in the result. The entry keeps ``initial``.
    """
    seen: dict[int, frozenset] = {}
    visits = {n.id: 0 for n in cfg.nodes}
    visits[cfg.entry] = max_visits  # the entry state is fixed

    def walk(node, acc):
        seen[node] = seen.get(node, acc) & acc
        for e in cfg.outgoing(node):
            if visits[e.dst] < max_visits:
                visits[e.dst] += 1
                walk(e.dst, acc | {a.name for a in e.accesses if a.mode == WRITE})
                visits[e.dst] -= 1

    walk(cfg.entry, frozenset(initial))
    seen[cfg.entry] = frozenset(initial)
    return seen


@st.composite
def rhs_text(draw, atoms=("B", "C", "'x'"), depth=3):
    """Right-hand side text built from sequences, alternatives and the three suffix operators."""
    if depth == 0 or draw(st.integers(0, 2)) == 0:
        return draw(st.sampled_from(list(atoms)))
    kind = draw(st.sampled_from(["seq", "alt", "opt", "star", "plus"]))
    if kind in ("seq", "alt"):
        parts = draw(st.lists(rhs_text(atoms, depth - 1), min_size=2, max_size=3))
        return "(" + (" " if kind == "seq" else " | ").join(parts) + ")"
    return "(" + draw(rhs_text(atoms, depth - 1)) + ")" + {"opt": "?", "star": "*", "plus": "+"}[kind]
