"""Command-line filter: read a program, split its rules, print the result.

Designed for pipeline use (``cat enc.lp instance.db | rulesplit | grounder
| solver``): the rewritten program goes to standard output and everything
diagnostic goes to standard error or to files.

Flags::

    -d        do not rewrite; re-render the input unchanged
    -b        per-rule decomposition report and timing on standard error
    -t        print per-rule bag listings instead of the rewritten program
    -i        ignore head variables when decomposing
    -h alg    decomposition heuristic: mcs, mf, or miw (default miw)
    -s seed   seed for heuristic tie-breaking (default 0)
    -f file   read from file instead of standard input
    -l file   write only the maximum width over all rules to file, then exit

Exit status: 0 on success, 1 on input/parse/safety errors, 2 on bad flags.
"""

from __future__ import annotations

import argparse
import sys
import time

from .decompose import UnsupportedConstructError, decompose_program
from .parser import ParseError, parse, render
from .treedecomp import HEURISTICS


def _build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rulesplit",
        add_help=False,
        description="Rewrite large rules into equivalent smaller ones.",
    )
    ap.add_argument("-d", action="store_true", dest="dumb", help="do not rewrite")
    ap.add_argument("-b", action="store_true", dest="benchmark", help="report to stderr")
    ap.add_argument("-t", action="store_true", dest="td_only", help="print bag listings only")
    ap.add_argument("-i", action="store_true", dest="ignore_head", help="ignore head variables")
    ap.add_argument("-h", dest="heuristic", choices=HEURISTICS, default="miw", metavar="alg")
    ap.add_argument("-s", dest="seed", type=int, default=0, metavar="seed")
    ap.add_argument("-f", dest="input_path", default=None, metavar="file")
    ap.add_argument("-l", dest="info_path", default=None, metavar="file")
    ap.add_argument("--help", action="help", help="show this help message and exit")
    return ap


def _format_bags(bags) -> str:
    return " ".join("{" + ",".join(sorted(bag)) + "}" for bag in bags)


def run(args: list[str], stdin=None, stdout=None, stderr=None) -> int:
    """Run the tool on ``args``; returns the exit status."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr

    ap = _build_arg_parser()
    try:
        options = ap.parse_args(args)
    except SystemExit as stop:
        # argparse already printed its message (exit code 0 is --help)
        return 0 if stop.code == 0 else 2

    if options.input_path is not None:
        try:
            with open(options.input_path, "r", encoding="utf-8") as handle:
                text = handle.read()
        except OSError as err:
            print(f"cannot read {options.input_path}: {err.strerror}", file=stderr)
            return 1
    else:
        text = stdin.read()

    try:
        program = parse(text)
    except ParseError as err:
        print(f"parse error at {err.location}: {err.kind}: {err.message}", file=stderr)
        return 1

    started = time.perf_counter()
    try:
        rewritten, report = decompose_program(
            program,
            heuristic=options.heuristic,
            seed=options.seed,
            include_head_clique=not options.ignore_head,
            enabled=not options.dumb,
        )
    except UnsupportedConstructError as err:
        print(f"unsupported construct: {err}", file=stderr)
        return 1
    elapsed = time.perf_counter() - started

    if options.benchmark:
        for row in report.rows:
            print(
                f"{row.rule_index}\t{row.width}\t{row.bag_count}"
                f"\t{row.rules_emitted}\t{row.domain_rules}",
                file=stderr,
            )
        print(
            f"total\t{report.max_width}\t{len(rewritten.rules)}\t{elapsed:.6f}",
            file=stderr,
        )

    if options.info_path is not None:
        try:
            with open(options.info_path, "w", encoding="utf-8") as handle:
                handle.write(f"{report.max_width}\n")
        except OSError as err:
            print(f"cannot write {options.info_path}: {err.strerror}", file=stderr)
            return 1
        return 0

    if options.td_only:
        for row in report.rows:
            print(
                f"rule {row.rule_index}: width {row.width}; bags: {_format_bags(row.bags)}",
                file=stdout,
            )
        return 0

    stdout.write(render(rewritten))
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
