"""Command line interface: batch checking, queries, the REPL, and the
local server for the web console."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .engine import Query, search_goal
from .library import Library, LoadError, default_paths, write_manifest
from .syntax import NameEnv, print_term


def cmd_check(args) -> int:
    lib = Library()
    failures = 0
    for target in args.files:
        p = Path(target)
        try:
            if p.exists():
                unit = lib.load_path(p)
            else:
                unit = lib.load(target)
        except LoadError as e:
            print(f"FAIL  {target}: {e}")
            failures += 1
            continue
        total = sum(unit.timings.values())
        checked = len(unit.proofs)
        stated = len(unit.unchecked)
        extra = f", {stated} statement(s) without scripts" if stated else ""
        print(f"ok    {unit.name}: {len(unit.defn.clauses)} clauses, "
              f"{checked} checked theorem(s) in {total:.2f}s{extra}")
        if args.verbose:
            for name, dt in unit.timings.items():
                print(f"        {name}: {dt * 1000:.0f} ms")
    return 1 if failures else 0


def cmd_query(args) -> int:
    from .session import parse_query
    lib = Library()
    try:
        unit = lib.load(args.lib)
    except LoadError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    goal, names = parse_query(unit.defn, unit.macros, args.goal)
    res = search_goal(unit.defn, Query(goal, args.depth))
    if res is None:
        print(f"exhausted at depth {args.depth} (no derivation found)")
        return 1
    answers, tree = res
    print("yes")
    env = NameEnv(unit.defn.sig)
    for hint, value in answers:
        if value is not None:
            print(f"  {hint} = {print_term(value, env)}")
    return 0


def cmd_repl(args) -> int:
    from .session import repl
    repl(args.file, json_mode=args.json or None)
    return 0


def cmd_serve(args) -> int:
    from .session import serve
    serve(args.addr)
    return 0


def cmd_manifest(args) -> int:
    root = Path(args.root) if args.root else default_paths()[-1]
    write_manifest(root)
    print(f"wrote {root / 'manifest.txt'}")
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="foldn",
        description="Proof assistant and batch checker for an intuitionistic "
                    "meta-logic with definitions and natural-number induction.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="batch-check .fnd files or library units")
    p.add_argument("files", nargs="+", metavar="FILE")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("query", help="goal-directed search over a library unit")
    p.add_argument("goal", metavar="GOAL")
    p.add_argument("--lib", required=True, help="library unit providing the definition")
    p.add_argument("--depth", type=int, default=25, help="backchaining depth bound")
    p.set_defaults(fn=cmd_query)

    p = sub.add_parser("repl", help="interactive session (line JSON when piped)")
    p.add_argument("file", nargs="?", help="an .fnd file to load first")
    p.add_argument("--json", action="store_true", help="force the JSON protocol")
    p.set_defaults(fn=cmd_repl)

    p = sub.add_parser("serve", help="HTTP session server and web console")
    p.add_argument("--addr", default="127.0.0.1:7110", metavar="HOST:PORT")
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("manifest", help="regenerate the library manifest")
    p.add_argument("--root", help="library directory (defaults to the packaged one)")
    p.set_defaults(fn=cmd_manifest)

    args = ap.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
