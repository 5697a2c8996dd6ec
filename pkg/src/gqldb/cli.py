"""Command-line entry point: script runner, REPL, server launcher, and
parse-only AST dumps.

Exit codes: 0 ok, 1 parse error, 2 execution error, 3 I/O error.
stdout carries only results; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys

from .ast import ast_tree
from .engine import Database, Session
from .errors import GqlError, IoFailure, LexError, ParseError, StoreError
from .parser import parse_script
from .render import json_text, table_text

EXIT_PARSE = 1
EXIT_EXEC = 2
EXIT_IO = 3


def build_arg_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gqldb",
        description="Embeddable GQL graph database: REPL, scripts, server.")
    p.add_argument("--db", metavar="PATH", help="database file")
    p.add_argument("--script", metavar="FILE", help="run a script file")
    p.add_argument("--serve", metavar="ADDR",
                   help="serve the database over HTTP (host:port)")
    p.add_argument("--parse-only", action="store_true",
                   help="parse the script (or stdin) and print the AST")
    p.add_argument("--user", default="anonymous", help="session user name")
    p.add_argument("--format", choices=("table", "json"), default="table",
                   dest="output_format", help="result format")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    modes = sum(1 for flag in (args.serve, args.parse_only) if flag)
    if modes > 1:
        print("choose one of --serve / --parse-only", file=sys.stderr)
        return EXIT_IO
    try:
        if args.parse_only:
            return parse_only(args)
        if args.db is None:
            print("--db is required", file=sys.stderr)
            return EXIT_IO
        if args.serve:
            return run_server(args)
        if args.script:
            return run_script(args)
        return run_repl(args)
    except (LexError, ParseError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (IoFailure, StoreError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except GqlError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EXEC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def _read_source(args) -> str:
    if args.script:
        with open(args.script, "r", encoding="utf-8") as f:
            return f.read()
    return sys.stdin.read()


def parse_only(args) -> int:
    for stmt in parse_script(_read_source(args)):
        print(ast_tree(stmt))
    return 0


def _print_result(table, fmt: str):
    if table is None:
        return
    if fmt == "json":
        print(json_text(table))
    else:
        print(table_text(table))


def run_script(args) -> int:
    text = _read_source(args)
    db = Database(args.db)
    session = Session(db, args.user)
    for _stmt, table in session.execute_text(text):
        _print_result(table, args.output_format)
    return 0


def run_repl(args) -> int:
    db = Database(args.db)
    session = Session(db, args.user)
    buffer = ""
    while True:
        prompt = "gql> " if not buffer else "...> "
        print(prompt, end="", file=sys.stderr, flush=True)
        line = sys.stdin.readline()
        if not line:
            break
        if line.strip() == ":quit":
            break
        buffer += line
        if not buffer.rstrip().endswith(";"):
            continue
        text, buffer = buffer, ""
        try:
            for _stmt, table in session.execute_text(text):
                _print_result(table, args.output_format)
        except GqlError as exc:
            print(f"error: {exc}", file=sys.stderr)
    return 0


def run_server(args) -> int:
    from .remote import ServerConfig, serve
    host, _, port = args.serve.rpartition(":")
    host = host or "127.0.0.1"
    db = Database(args.db)
    service = serve(db, (host, int(port)), ServerConfig())
    print(f"serving on http://{service.address[0]}:{service.address[1]}/g/...",
          file=sys.stderr)
    try:
        service.thread.join()
    except KeyboardInterrupt:
        service.shutdown()
    return 0


if __name__ == "__main__":
    sys.exit(main())
