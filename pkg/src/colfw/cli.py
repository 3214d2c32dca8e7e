"""Command-line front end: ``colfw {check,unfold,validity,erase,parse} FILE``."""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .diagnostics import IO_ERROR, Diagnostic, render_json, render_text, sort_diagnostics
from .pipeline import Loaded, check_loaded, load_file
from .printer import Printer, print_signature
from .substitution import erase
from .syntax import DefDecl, KindDecl
from .unfolding import DefTable, ExpansionError
from .validity import validity_report

EXIT_OK, EXIT_DIAGNOSTICS, EXIT_USAGE = 0, 1, 2


def _depth(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid depth {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("depth must be non-negative")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="colfw", description="Depth-indexed checker for coinductive LF signatures.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="input .colf file")
    common.add_argument("--depth", type=_depth, default=4, help="observation depth (default 4)")
    common.add_argument("--json", action="store_true", help="emit diagnostics as JSON")
    common.add_argument("--show-implicit", action="store_true", help="print implicit arguments")
    common.add_argument("--max-memo-entries", type=int, default=None, help=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="type-check at a depth")
    unfold = sub.add_parser("unfold", parents=[common], help="expand a definition to a depth")
    unfold.add_argument("name")
    sub.add_parser("validity", parents=[common], help="report trace validity of definitions")
    erase_cmd = sub.add_parser("erase", parents=[common], help="print the simple type of a declaration")
    erase_cmd.add_argument("name")
    sub.add_parser("parse", parents=[common], help="print the elaborated signature")
    return parser


class _Output:
    def __init__(self, args, stdout, stderr) -> None:
        self.args = args
        self.stdout = stdout
        self.stderr = stderr

    def diagnostics(self, diags, extra: dict | None = None) -> None:
        diags = sort_diagnostics(diags)
        if self.args.json:
            payload = json.loads(render_json(diags, self.args.file))
            if extra:
                payload.update(extra)
            print(json.dumps(payload, indent=2), file=self.stdout)
        elif diags:
            print(render_text(diags, self.stderr), file=self.stderr)

    def error(self, code: str, message: str) -> None:
        self.diagnostics([Diagnostic(code, message)])


def main(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = _Output(args, stdout, stderr)
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
    try:
        loaded = load_file(args.file)
    except (OSError, UnicodeDecodeError) as exc:
        out.error(IO_ERROR, f"cannot read {args.file}: {getattr(exc, 'strerror', None) or exc}")
        return EXIT_USAGE
    handler = {
        "check": _check,
        "unfold": _unfold,
        "validity": _validity,
        "erase": _erase,
        "parse": _parse,
    }[args.command]
    return handler(args, loaded, out)


def _check(args, loaded: Loaded, out: _Output) -> int:
    diags, _ = check_loaded(loaded, args.depth)
    out.diagnostics(diags)
    return EXIT_DIAGNOSTICS if diags else EXIT_OK


def _unfold(args, loaded: Loaded, out: _Output) -> int:
    sig = loaded.signature
    decl = sig.get(args.name)
    if not isinstance(decl, DefDecl):
        what = "not a definition" if decl is not None else "not declared"
        out.diagnostics(loaded.diagnostics + [Diagnostic("undeclared-name", f"{args.name!r} is {what}")])
        return EXIT_DIAGNOSTICS
    table = DefTable(sig, args.max_memo_entries)
    try:
        term = table.body(args.name, args.depth)
    except ExpansionError as err:
        out.diagnostics(loaded.diagnostics + [err.diagnostic])
        return EXIT_DIAGNOSTICS
    printer = Printer(sig.implicit_counts(), args.show_implicit)
    if not args.show_implicit:
        for _ in range(decl.implicit):
            term = getattr(term, "body", term)
    if args.json:
        out.diagnostics(loaded.diagnostics, {"term": printer.term(term)})
    else:
        out.diagnostics(loaded.diagnostics)
        print(printer.term(term), file=out.stdout)
    return EXIT_DIAGNOSTICS if loaded.diagnostics else EXIT_OK


def _validity(args, loaded: Loaded, out: _Output) -> int:
    report = validity_report(loaded.signature)
    diags = loaded.diagnostics + report.diagnostics
    if args.json:
        out.diagnostics(diags, {"report": report.to_dict()})
    else:
        out.diagnostics(diags)
        print(report.render(), file=out.stdout)
    return EXIT_OK if report.ok and not diags else EXIT_DIAGNOSTICS


def _erase(args, loaded: Loaded, out: _Output) -> int:
    decl = loaded.signature.get(args.name)
    if decl is None:
        out.diagnostics(loaded.diagnostics + [Diagnostic("undeclared-name", f"{args.name!r} is not declared")])
        return EXIT_DIAGNOSTICS
    if isinstance(decl, KindDecl):
        print(f"colfw: {args.name!r} is a type family; only constants and definitions have simple types",
              file=out.stderr)
        return EXIT_USAGE
    ty = decl.type
    if not args.show_implicit:
        for _ in range(decl.implicit):
            ty = ty.cod
    simple = str(erase(ty))
    if args.json:
        out.diagnostics(loaded.diagnostics, {"erased": simple})
    else:
        out.diagnostics(loaded.diagnostics)
        print(simple, file=out.stdout)
    return EXIT_DIAGNOSTICS if loaded.diagnostics else EXIT_OK


def _parse(args, loaded: Loaded, out: _Output) -> int:
    text = print_signature(loaded.signature, args.show_implicit)
    if args.json:
        out.diagnostics(loaded.diagnostics, {"signature": text})
    else:
        out.diagnostics(loaded.diagnostics)
        print(text, end="", file=out.stdout)
    return EXIT_DIAGNOSTICS if loaded.diagnostics else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
