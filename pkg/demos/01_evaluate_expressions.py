"""Check the bundled arithmetic specification, then run it on a few inputs."""

from typedpg import analyze
from typedpg.backend.interpreter import ParseError, interpret
from typedpg.demo import ARITH_CALLBACKS, ARITH_SPEC_PATH, SIMPLE_GTS_PATH
from typedpg.pipeline import analyze_files

# The type system file names the ground types (Int, String, Environment, Object)
# and how they are spelled in Java. The specification declares its external
# functions and attaches translation functions to expr, term and factor.
checked, profile = analyze_files(ARITH_SPEC_PATH, SIMPLE_GTS_PATH)
print("diagnostics:", checked.diagnostics)
print("back-end profile:", profile.backend_id)

# Each external function is bound to a Python callable taking and returning tuples.
env = {"x": 4, "y": 10}
for text in ["x*(3+2)", "7", "y - x*x + 1", "(x + y) * (x - y)"]:
    (value,) = interpret(checked, "expr", inputs=(env,), text=text, externals=ARITH_CALLBACKS)
    print(f"{text:>20} = {value}")

# Input the grammar does not accept stops with a positioned parse error.
try:
    interpret(checked, "expr", inputs=(env,), text="(x+*3)", externals=ARITH_CALLBACKS)
except ParseError as e:
    print("rejected:", e)

# Other start rules work too, as long as their inputs are supplied.
print("term 2*3*4 =", interpret(checked, "term", inputs=({},), text="2*3*4", externals=ARITH_CALLBACKS)[0])

# debug=True re-checks every stored value's type tag against its static type.
print("debug run:", interpret(checked, "expr", inputs=(env,), text="x*y", externals=ARITH_CALLBACKS, debug=True))

# analyze() also takes plain text, e.g. for a one-off tweak of the specification.
assert analyze(ARITH_SPEC_PATH.read_text(), checked.extension).ok
