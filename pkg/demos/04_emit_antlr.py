"""Generate the ANTLR grammar and the Java interface for the external functions."""

import sys
import tempfile
from pathlib import Path

from typedpg.backend.emitter import emit_files
from typedpg.cli import main
from typedpg.demo import ARITH_SPEC_PATH, SIMPLE_GTS_PATH
from typedpg.pipeline import analyze_files

checked, profile = analyze_files(ARITH_SPEC_PATH, SIMPLE_GTS_PATH)
files = emit_files(checked, profile)

# Rule parameters and results carry the Java spellings from the type system
# file; actions sit inline where the translation function placed them.
grammar = files["ExpressionEvaluator.g"]
expr = grammar[grammar.index("expr[") : grammar.index("\nterm[")]
print(expr)
print(files["ExpressionEvaluatorExternals.java"])

# The same through the command line. Nothing is written when checking fails.
with tempfile.TemporaryDirectory() as out:
    code = main(["emit", str(ARITH_SPEC_PATH), "--typesystem", str(SIMPLE_GTS_PATH), "--out", out])
    print("exit code", code, "->", sorted(p.name for p in Path(out).iterdir()), file=sys.stderr)
