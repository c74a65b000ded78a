"""Command-line driver: ``check``, ``emit`` and ``run``.

Exit status: 0 success, 1 specification errors, 2 usage or I/O errors,
3 runtime errors while interpreting input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence, TextIO

from .backend.emitter import emit_files
from .backend.interpreter import HostError, InterpretError, LexError, NotLL1Error, ParseError, UnboundExternalError, interpret
from .demo import load_bindings
from .diagnostics import DiagnosticError, sort_diagnostics
from .extensions import get_extension, registered_extensions
from .gts import parse_type_system_file
from .pipeline import CheckedSpec, analyze, declarative_extension

EXIT_OK, EXIT_ERRORS, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _env_pair(text: str) -> tuple[str, str]:
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    return key, value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="typedpg", description="Check, emit and run typed parser specifications.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("spec", help="specification file")
        p.add_argument("--typesystem", help="type system description file (.gts)")
        p.add_argument("--extension", default="declarative", choices=registered_extensions())
        p.add_argument("--profile", help="back-end profile name (full id or last component)")

    check = sub.add_parser("check", help="report diagnostics")
    common(check)
    check.add_argument("--dot-cfg", metavar="FUNCTION", help="print the control-flow graph of a translation function as DOT")

    emit = sub.add_parser("emit", help="write the ANTLR grammar and the externals interface")
    common(emit)
    emit.add_argument("--out", required=True, help="output directory")

    run = sub.add_parser("run", help="interpret input text")
    common(run)
    run.add_argument("--start", required=True, help="start rule")
    run.add_argument("--function", help="start translation function (default: the rule's main one)")
    source = run.add_mutually_exclusive_group(required=True)
    source.add_argument("--input", help="input file, or - for standard input")
    source.add_argument("--text", help="input text given inline")
    run.add_argument("--bindings", default="arith", help="built-in binding set or module:attribute")
    run.add_argument("--env", action="append", type=_env_pair, default=[], metavar="KEY=VALUE")
    run.add_argument("--debug", action="store_true", help="check runtime type tags against static types")
    return parser


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"can not read {path}: {e.strerror or e}") from e


def _load(args) -> tuple[CheckedSpec, object]:
    text = _read(args.spec)
    profile = None
    if args.extension == "declarative":
        if not args.typesystem:
            raise UsageError("--typesystem is required with the declarative extension")
        gts = parse_type_system_file(_read(args.typesystem), args.typesystem)
        try:
            ext, profile = declarative_extension(gts, args.profile)
        except KeyError as e:
            raise UsageError(e.args[0]) from e
    else:
        ext = get_extension(args.extension)
        if args.profile:
            raise UsageError("profiles are only available with a type system file")
    return analyze(text, ext, args.spec), profile


def _report(diags, err: TextIO) -> None:
    for d in sort_diagnostics(diags):
        print(d.render(), file=err)


def command_check(args, out: TextIO, err: TextIO) -> int:
    checked, _ = _load(args)
    _report(checked.diagnostics, err)
    if not checked.ok:
        return EXIT_ERRORS
    if args.dot_cfg:
        cfg = checked.cfgs.get(args.dot_cfg)
        if cfg is None:
            raise UsageError(f"no translation function named {args.dot_cfg}")
        out.write(cfg.to_dot(args.dot_cfg))
    return EXIT_OK


def command_emit(args, out: TextIO, err: TextIO) -> int:
    checked, profile = _load(args)
    _report(checked.diagnostics, err)
    if not checked.ok:
        return EXIT_ERRORS
    files = emit_files(checked, profile)
    target = Path(args.out)
    try:
        target.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            (target / name).write_text(text, encoding="utf-8")
    except OSError as e:
        raise UsageError(f"can not write to {target}: {e.strerror or e}") from e
    for name in files:
        print(target / name, file=out)
    return EXIT_OK


def command_run(args, out: TextIO, err: TextIO) -> int:
    checked, _ = _load(args)
    _report(checked.diagnostics, err)
    if not checked.ok:
        return EXIT_ERRORS
    text = sys.stdin.read() if args.input == "-" else (_read(args.input) if args.input is not None else args.text)
    try:
        bindings = load_bindings(args.bindings)
    except (ValueError, ImportError, AttributeError) as e:
        raise UsageError(str(e)) from e
    env = dict(args.env)
    try:
        values = interpret(
            checked,
            args.start,
            args.function,
            bindings.make_inputs(env),
            text,
            bindings.callbacks,
            debug=args.debug,
        )
    except NotLL1Error as e:
        _report(e.diagnostics, err)
        return EXIT_ERRORS
    except (UnboundExternalError, ValueError) as e:
        raise UsageError(str(e)) from e
    except (LexError, ParseError, HostError, InterpretError) as e:
        print(f"{args.input or '<text>'}:{e}" if isinstance(e, (LexError, ParseError)) else str(e), file=err)
        return EXIT_RUNTIME
    for v in values:
        print(v, file=out)
    return EXIT_OK


COMMANDS = {"check": command_check, "emit": command_emit, "run": command_run}


def main(argv: Optional[Sequence[str]] = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0) and EXIT_USAGE
    try:
        return COMMANDS[args.command](args, out, err)
    except UsageError as e:
        print(f"typedpg: error: {e}", file=err)
        return EXIT_USAGE
    except DiagnosticError as e:
        _report(e.diagnostics, err)
        return EXIT_ERRORS


if __name__ == "__main__":
    raise SystemExit(main())
