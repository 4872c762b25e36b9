"""Command-line interface: solve one file, generate corpora, benchmark a directory.

Exit codes for ``solve``: 0 solved and verified, 1 budget exhausted or
unsolvable within the grammar, 2 parse or shape error.
"""

from __future__ import annotations

import argparse
import csv
import statistics
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .corpus import CorpusSpec, GRAMMAR_TEMPLATES, generate_corpus
from .errors import BvSynthError, ProblemFormatError, SynthesisFailure
from .frontend import emit_solution, parse_problem
from .solver import SearchLimits, solve_problem

CSV_COLUMNS = ["file", "status", "millis", "solution_size", "internal_nodes", "candidates"]


def _read_text(path: Path) -> str:
    # newline="" keeps CRLF bytes intact (the reader owns line-ending
    # tolerance); utf-8-sig swallows a Windows BOM if one is present.
    with open(path, encoding="utf-8-sig", newline="") as handle:
        return handle.read()


def _limits(args: argparse.Namespace) -> SearchLimits:
    return SearchLimits(
        max_size=args.max_size, max_candidates=args.max_candidates, timeout=args.timeout
    )


def cmd_solve(args: argparse.Namespace) -> int:
    try:
        problem = parse_problem(_read_text(Path(args.file)))
    except (OSError, ProblemFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        result = solve_problem(problem, _limits(args))
    except SynthesisFailure as exc:
        print(f"unsolved: {exc}", file=sys.stderr)
        return 1
    except BvSynthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(emit_solution(problem, result.solution))
    if args.stats:
        for line in result.stats.lines():
            print(line, file=sys.stderr)
    return 0


def cmd_gen(args: argparse.Namespace) -> int:
    spec = CorpusSpec(
        count=args.count,
        size_min=args.size_min,
        size_max=args.size_max,
        examples=args.examples,
        width=args.width,
        seed=args.seed,
        grammar=args.grammar,
    )
    try:
        paths = generate_corpus(spec, Path(args.out))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {len(paths)} instances to {args.out}")
    return 0


@dataclass
class BenchRow:
    file: str
    status: str
    millis: int
    solution_size: int | None = None
    internal_nodes: int | None = None
    candidates: int | None = None

    def cells(self) -> list[str]:
        opt = lambda v: "" if v is None else str(v)
        return [
            self.file,
            self.status,
            str(self.millis),
            opt(self.solution_size),
            opt(self.internal_nodes),
            opt(self.candidates),
        ]


def bench_directory(
    directory: Path, limits: SearchLimits, solutions_dir: Path | None = None
) -> list[BenchRow]:
    rows: list[BenchRow] = []
    if solutions_dir is not None:
        solutions_dir.mkdir(parents=True, exist_ok=True)
    for path in sorted(directory.glob("*.sl")):
        started = time.perf_counter()
        try:
            problem = parse_problem(_read_text(path))
            result = solve_problem(problem, limits)
        except SynthesisFailure:
            millis = int((time.perf_counter() - started) * 1000)
            rows.append(BenchRow(path.name, "budget", millis))
            continue
        except (OSError, BvSynthError) as exc:
            millis = int((time.perf_counter() - started) * 1000)
            rows.append(BenchRow(path.name, "error", millis))
            print(f"{path.name}: {exc}", file=sys.stderr)
            continue
        millis = int((time.perf_counter() - started) * 1000)
        rows.append(
            BenchRow(
                path.name,
                "solved",
                millis,
                solution_size=result.stats.solution_size,
                internal_nodes=result.stats.internal_nodes,
                candidates=result.stats.candidates,
            )
        )
        if solutions_dir is not None:
            out = solutions_dir / (path.stem + ".sol")
            out.write_text(emit_solution(problem, result.solution) + "\n", encoding="utf-8", newline="\n")
    return rows


def _print_table(rows: list[BenchRow]) -> None:
    widths = [max([len(c)] + [len(r.cells()[i]) for r in rows]) for i, c in enumerate(CSV_COLUMNS)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    print(fmt.format(*CSV_COLUMNS))
    for row in rows:
        print(fmt.format(*row.cells()))
    solved = [r for r in rows if r.status == "solved"]
    if solved:
        times = [r.millis for r in solved]
        print(
            f"solved {len(solved)}/{len(rows)}  "
            f"mean {statistics.mean(times):.1f} ms  median {statistics.median(times):.1f} ms"
        )
    else:
        print(f"solved 0/{len(rows)}")


def cmd_bench(args: argparse.Namespace) -> int:
    directory = Path(args.dir)
    if not directory.is_dir():
        print(f"error: not a directory: {directory}", file=sys.stderr)
        return 2
    solutions_dir = Path(args.solutions) if args.solutions else None
    rows = bench_directory(directory, _limits(args), solutions_dir)
    _print_table(rows)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(CSV_COLUMNS)
            for row in rows:
                writer.writerow(row.cells())
    return 0


def _add_budget_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--timeout", type=float, default=None, help="wall-clock seconds per solve")
    parser.add_argument("--max-size", type=int, default=12, help="largest expression size searched")
    parser.add_argument(
        "--max-candidates", type=int, default=5_000_000, help="candidate budget per search"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bvsynth", description="PBE synthesizer for fixed-width bitvector functions"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one SyGuS problem file")
    solve.add_argument("file")
    _add_budget_flags(solve)
    solve.add_argument("--stats", action="store_true", help="print run statistics to stderr")
    solve.set_defaults(func=cmd_solve)

    gen = sub.add_parser("gen", help="generate a random solvable corpus")
    gen.add_argument("--count", type=int, required=True)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--size-min", type=int, required=True)
    gen.add_argument("--size-max", type=int, required=True)
    gen.add_argument("--examples", type=int, required=True)
    gen.add_argument("--width", type=int, required=True)
    gen.add_argument("--out", required=True)
    gen.add_argument("--grammar", choices=sorted(GRAMMAR_TEMPLATES), default="icfp")
    gen.set_defaults(func=cmd_gen)

    bench = sub.add_parser("bench", help="solve every .sl file in a directory")
    bench.add_argument("dir")
    _add_budget_flags(bench)
    bench.add_argument("--csv", default=None, help="also write results as CSV")
    bench.add_argument("--solutions", default=None, help="write each solution next to its name")
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
