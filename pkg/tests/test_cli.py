from __future__ import annotations

import io
import subprocess
import sys

import pytest

from typedpg.cli import EXIT_ERRORS, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, main
from typedpg.demo import ARITH_SPEC_PATH, SIMPLE_GTS_PATH

SPEC, GTS = str(ARITH_SPEC_PATH), str(SIMPLE_GTS_PATH)


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture()
def broken_spec(tmp_path, arith_text):
    path = tmp_path / "broken.tpg"
    path.write_text(arith_text.replace("result = strToInt(INT#)", "result = INT#"))
    return str(path)


def test_check_ok():
    assert cli("check", SPEC, "--typesystem", GTS) == (EXIT_OK, "", "")


def test_check_reports_errors(broken_spec):
    code, _, err = cli("check", broken_spec, "--typesystem", GTS)
    assert code == EXIT_ERRORS
    assert "error[E-TYPE-INCOMPAT]: Incompatible types: String and Int" in err
    assert err.startswith(broken_spec + ":41:")


def test_check_prints_cfg():
    code, out, _ = cli("check", SPEC, "--typesystem", GTS, "--dot-cfg", "term")
    assert code == EXIT_OK and out.startswith('digraph "term"')


def test_unknown_cfg_function():
    assert cli("check", SPEC, "--typesystem", GTS, "--dot-cfg", "nope")[0] == EXIT_USAGE


def test_missing_file():
    code, _, err = cli("check", "/nonexistent.tpg", "--typesystem", GTS)
    assert code == EXIT_USAGE and "can not read" in err


def test_declarative_needs_typesystem():
    assert cli("check", SPEC)[0] == EXIT_USAGE


def test_bad_arguments():
    assert cli("frobnicate")[0] == EXIT_USAGE
    assert cli("run", SPEC, "--typesystem", GTS, "--start", "expr")[0] == EXIT_USAGE


def test_emit_writes_both_files(tmp_path):
    code, out, _ = cli("emit", SPEC, "--typesystem", GTS, "--out", str(tmp_path))
    assert code == EXIT_OK
    assert sorted(p.name for p in tmp_path.iterdir()) == ["ExpressionEvaluator.g", "ExpressionEvaluatorExternals.java"]
    assert len(out.splitlines()) == 2


def test_emit_writes_nothing_on_errors(tmp_path, broken_spec):
    target = tmp_path / "out"
    assert cli("emit", broken_spec, "--typesystem", GTS, "--out", str(target))[0] == EXIT_ERRORS
    assert not target.exists()


def test_emit_unknown_profile(tmp_path):
    assert cli("emit", SPEC, "--typesystem", GTS, "--profile", "Nope", "--out", str(tmp_path))[0] == EXIT_USAGE


def test_run_prints_value():
    code, out, _ = cli("run", SPEC, "--typesystem", GTS, "--start", "expr", "--text", "x*(3+2)", "--env", "x=4")
    assert (code, out) == (EXIT_OK, "20\n")


def test_run_from_file(tmp_path):
    src = tmp_path / "in.txt"
    src.write_text("2 * 21\n")
    code, out, _ = cli("run", SPEC, "--typesystem", GTS, "--start", "expr", "--input", str(src), "--debug")
    assert (code, out) == (EXIT_OK, "42\n")


def test_run_parse_error():
    code, _, err = cli("run", SPEC, "--typesystem", GTS, "--start", "expr", "--text", "(1+")
    assert code == EXIT_RUNTIME and err.startswith("<text>:1:4:")


def test_run_unknown_bindings():
    code, _, err = cli("run", SPEC, "--typesystem", GTS, "--start", "expr", "--text", "1", "--bindings", "nope")
    assert code == EXIT_USAGE and "unknown bindings" in err


def test_bad_env_pair():
    assert cli("run", SPEC, "--typesystem", GTS, "--start", "expr", "--text", "1", "--env", "novalue")[0] == EXIT_USAGE


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "typedpg", "run", SPEC, "--typesystem", GTS, "--start", "expr", "--text", "6*7"],
        capture_output=True,
        text=True,
    )
    assert (proc.returncode, proc.stdout) == (0, "42\n")
