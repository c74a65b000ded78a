from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import NAMES, path_meet, random_cfgs, rhs_text
from typedpg.dataflow import (
    ACTION,
    BRANCH,
    ENTRY,
    EXIT,
    JOIN,
    LOOP_HEAD,
    MATCH,
    READ,
    WRITE,
    Access,
    assigned_before,
    build_cfg,
    check_definite_assignment,
)
from typedpg.diagnostics import E_FLOW_OUTPUT, E_FLOW_UNINIT
from typedpg.frontend import parse_specification


def cfg_of(text, name):
    spec = parse_specification(text)
    f = spec.function(name)
    return build_cfg(spec.grammar.rule(f.rule), f), f


def access_trace(cfg):
    return [str(a) for e in cfg.edges for a in e.accesses]


def test_expr_graph_shape(checked_arith):
    cfg = checked_arith.cfgs["expr"]
    kinds = cfg.kinds()
    assert kinds.count(LOOP_HEAD) == 1 and kinds.count(BRANCH) == 1 and kinds.count(JOIN) == 1
    head = kinds.index(LOOP_HEAD)
    # the loop body leaves from the head and an edge returns to it
    assert any(e.dst == head and e.src > head for e in cfg.edges)
    assert kinds.index(BRANCH) > head
    assert access_trace(cfg) == [
        "result[w]",
        "sign[w]",
        "env[r]",
        "t[w]",
        "result[r]",
        "sign[r]",
        "t[r]",
        "result[w]",
        "sign[w]",
        "sign[r]",
        "sign[w]",
        "env[r]",
        "t[w]",
        "result[r]",
        "sign[r]",
        "t[r]",
        "result[w]",
    ]


def test_single_symbol_chain():
    cfg, _ = cfg_of("a : B ; a() --> (Int x) { after B : x = f(); } B : 'b' ;", "a")
    assert cfg.kinds() == [ENTRY, MATCH, ACTION, EXIT]
    assert [(e.src, e.dst) for e in cfg.edges] == [(0, 1), (1, 2), (2, 3)]
    assert [e.accesses for e in cfg.edges][1] == (Access("x", WRITE),)


def test_optional_has_empty_edge():
    cfg, _ = cfg_of("a : B? ; a() --> () { } B : 'b' ;", "a")
    assert cfg.kinds() == [ENTRY, BRANCH, MATCH, JOIN, EXIT]
    assert sorted((e.src, e.dst) for e in cfg.edges) == [(0, 1), (1, 2), (1, 3), (2, 3), (3, 4)]


def test_plus_loops_back_through_branch():
    cfg, _ = cfg_of("a : B+ ; a() --> () { } B : 'b' ;", "a")
    assert cfg.kinds() == [ENTRY, LOOP_HEAD, MATCH, BRANCH, EXIT]
    assert (3, 1) in [(e.src, e.dst) for e in cfg.edges]


def test_at_accesses_on_edge_into_match(checked_arith):
    cfg = checked_arith.cfgs["term"]
    matches = [n.id for n in cfg.nodes if n.kind == MATCH and n.occurrence.name == "factor"]
    for m in matches:
        (edge,) = cfg.incoming(m)
        assert [str(a) for a in edge.accesses] == ["env[r]", "f[w]"]


def test_unassigned_token_text_read(arith_variant):
    checked = arith_variant("result = INT")
    assert [d.render() for d in checked.diagnostics] == [
        "arith.tpg:41:26: error[E-FLOW-UNINIT]: The local attribute INT might have not been initialized"
    ]


def test_output_missing_on_empty_iteration():
    text = "a : B* ; a() --> (Int x) { after B : x = f(); } B : 'b' ;"
    cfg, f = cfg_of(text, "a")
    diags = check_definite_assignment(cfg, f)
    assert [d.code for d in diags] == [E_FLOW_OUTPUT]


def test_read_before_write_in_loop():
    text = "a : B* ; a(Int y) --> (Int x) { Int z; before B : x = g(z); after B : z = g(y); } B : 'b' ;"
    cfg, f = cfg_of(text, "a")
    codes = [d.code for d in check_definite_assignment(cfg, f)]
    assert sorted(codes) == [E_FLOW_OUTPUT, E_FLOW_UNINIT]


def test_both_alternatives_assign():
    text = "a : B | C ; a() --> (Int x) { after B : x = f(); after C : x = g(); } B : 'b' ; C : 'c' ;"
    cfg, f = cfg_of(text, "a")
    assert check_definite_assignment(cfg, f) == []


def test_dot_output(checked_arith):
    dot = checked_arith.cfgs["factor"].to_dot("factor")
    assert dot.startswith('digraph "factor" {') and "->" in dot


# -- properties ---------------------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(random_cfgs().filter(lambda c: len(c[0].edges) <= 14))
def test_fixpoint_matches_path_enumeration(case):
    cfg, initial = case
    expected = path_meet(cfg, initial)
    got = assigned_before(cfg, initial)
    assert {n: got[n] for n in expected} == expected


@settings(max_examples=100, deadline=None)
@given(random_cfgs().filter(lambda c: len(c[0].edges) <= 14), st.sampled_from(NAMES))
def test_more_inputs_never_shrink_assigned_sets(case, extra):
    cfg, initial = case
    small = assigned_before(cfg, initial)
    big = assigned_before(cfg, initial | {extra})
    assert all(small[n] <= big[n] for n in small)


def _reach(cfg, start, forward=True):
    todo, found = [start], {start}
    while todo:
        n = todo.pop()
        for m in cfg.successors(n) if forward else cfg.predecessors(n):
            if m not in found:
                found.add(m)
                todo.append(m)
    return found


@settings(max_examples=150, deadline=None)
@given(rhs_text())
def test_every_node_lies_on_an_entry_exit_path(body):
    text = f"a : B {body} C ; a() --> (Int x) {{ before B : x = f(); after C : x = g(x); }} B : 'b' ; C : 'c' ;"
    cfg, _ = cfg_of(text, "a")
    every = {n.id for n in cfg.nodes}
    assert _reach(cfg, cfg.entry) == every
    assert _reach(cfg, cfg.exit, forward=False) == every
    assert [n.kind for n in cfg.nodes].count(ENTRY) == 1 and cfg.nodes[cfg.exit].kind == EXIT


def test_read_access_mode_constants():
    assert str(Access("v", READ)) == "v[r]"
