"""Control-flow graphs behind the definite-assignment check."""

from typedpg.dataflow import assigned_before
from typedpg.demo import ARITH_SPEC_PATH, SIMPLE_GTS_PATH
from typedpg.pipeline import analyze, analyze_files, declarative_extension, load_type_system_file

checked, _ = analyze_files(ARITH_SPEC_PATH, SIMPLE_GTS_PATH)
cfg = checked.cfgs["expr"]

# The '*' of expr becomes a loop head; the ('+' | '-') choice inside it a branch.
for edge in cfg.edges:
    src, dst = cfg.nodes[edge.src].label(), cfg.nodes[edge.dst].label()
    print(f"{src:>28} -> {dst:<28} {' '.join(map(str, edge.accesses))}")

# Attributes definitely written on every path into each node.
state = assigned_before(cfg, {"env"})
print("assigned at exit:", sorted(state[cfg.exit]))

# Pipe this into `dot -Tpng` to draw it.
print(cfg.to_dot("expr"))

# An output written only inside an optional phrase may stay unassigned.
ext, _ = declarative_extension(load_type_system_file(SIMPLE_GTS_PATH))
spec = "a : B? ; a() --> (Int n) { after B : n = f(); } B : 'b' ;"
for d in analyze(spec, ext).diagnostics:
    print(d.render())
