"""What the front end reports for a few broken versions of the arithmetic example."""

from typedpg.demo import ARITH_SPEC_PATH, SIMPLE_GTS_PATH
from typedpg.pipeline import analyze, declarative_extension, load_type_system_file

ext, _ = declarative_extension(load_type_system_file(SIMPLE_GTS_PATH))
original = ARITH_SPEC_PATH.read_text()
line = "result = strToInt(INT#)"

variants = {
    # INT without '#' is an undeclared local attribute, read before any write.
    "token name instead of its text": line.replace("strToInt(INT#)", "INT"),
    # INT# is a String; result is an Int and String is not a subtype of Int.
    "missing conversion": "result = INT#",
    "the correct action": line,
}
for title, replacement in variants.items():
    checked = analyze(original.replace(line, replacement), ext, "arith.tpg")
    print(f"-- {title}: {replacement}")
    for d in checked.diagnostics:
        print("  ", d.render())
    if checked.ok:
        print("   no diagnostics")

# A nonterminal whose translation functions all take inputs needs an 'at' call.
checked = analyze(original.replace("    at expr   : result = expr(env);\n", ""), ext, "arith.tpg")
print("-- 'at' action removed")
for d in checked.diagnostics:
    print("  ", d.render())
