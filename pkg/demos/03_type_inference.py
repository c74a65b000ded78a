"""Local attribute types are inferred from subtyping constraints."""

from typedpg.gts import parse_type_system_file
from typedpg.pipeline import analyze, declarative_extension
from typedpg.typechecker import Constraint, InferenceError, TypeVar, solve_constraints
from typedpg.typesystem import GroundType, TypeSystemDesc, close_subtyping

G = GroundType

# t is bounded below by Integer (from x) and above by Object (via result).
# The solver picks the smallest type meeting the lower bounds.
gts = parse_type_system_file(
    "typesystem J(Object, String) { type Integer; Integer <: Object; }", "j.gts"
)
ext, _ = declarative_extension(gts)
spec = """
f : B C ;
  f(Integer x) --> (Object result) {
    before B : t = x;
    after  C : result = t;
  }
B : 'b' ;
C : 'c' ;
"""
types = analyze(spec, ext).function_types["f"]
print("inferred locals:", {n: types.attributes[n].name for n in types.inferred_locals})

# Undeclared external functions get inferred signatures as well.
spec2 = "g : B ; g(Integer a) --> (Object r) { after B : r = h(a); } B : 'b' ;"
checked = analyze(spec2, ext)
for sig in checked.inferred_externals:
    ins = ", ".join(d.type.text for d in sig.inputs)
    outs = ", ".join(d.type.text for d in sig.outputs)
    print(f"inferred external: {sig.name}({ins}) --> ({outs})")

# The solver can be called directly. A and B have two incomparable common
# supertypes, so nothing picks one of them.
system = close_subtyping(
    TypeSystemDesc("D", "S", None, ("A", "B", "C", "D", "S"), (("A", "C"), ("A", "D"), ("B", "C"), ("B", "D")))
)
tau = TypeVar(0, "tau")
try:
    solve_constraints(system, [tau], [Constraint(G("A"), tau), Constraint(G("B"), tau)])
except InferenceError as e:
    print("ambiguous:", e.diagnostics[0].message)

# With a single upper bound the largest fitting type is chosen.
print("upper bound only:", solve_constraints(system, [tau], [Constraint(tau, G("C"))])[tau].name)
