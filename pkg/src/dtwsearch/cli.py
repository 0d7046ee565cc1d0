"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from typing import List, Optional

import numpy as np

from .core import Dataset, InvalidInputError, SearchParams, parse_exponent, parse_window
from .datagen import Family, generate_database
from .experiments import run_classification, run_pruning_bench, run_triangle, write_csv
from .io import load_dataset, save_dataset
from .reduction import DEFAULT_DIMENSIONS, make_cover
from .search import Strategy, build_index, nearest_neighbor

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

BENCH_COLUMNS = (
    "fraction, database_size, strategy, queries, candidates_seen, dtw_evaluations, pruned_by_index, "
    "pruned_by_lb_keogh, pruned_by_lb_improved, pruning_fraction, comparisons, budget_ok, seconds"
)
NN_COLUMNS = (
    "query, best_id, best_dist, label, candidates_seen, pruned_by_index, pruned_by_lb_keogh, "
    "pruned_by_lb_improved, dtw_evaluations, comparisons"
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> List[int]:
    out: List[int] = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _float_list(text: str) -> List[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _exponent(text: str) -> float:
    try:
        return parse_exponent(text)
    except InvalidInputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _exponent_list(text: str) -> List[float]:
    return [_exponent(t) for t in text.split(",") if t.strip()]


def _strategy(text: str) -> Strategy:
    try:
        return Strategy(text.strip())
    except ValueError as exc:
        names = ", ".join(s.value for s in Strategy)
        raise argparse.ArgumentTypeError(f"unknown strategy {text!r} (choose from {names})") from exc


def _strategy_list(text: str) -> List[Strategy]:
    if text.strip() == "all":
        return list(Strategy)
    return [_strategy(t) for t in text.split(",") if t.strip()]


def _family(text: str) -> Family:
    try:
        return Family.parse(text)
    except InvalidInputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dtwsearch", description="DTW nearest-neighbor retrieval with lower-bound pruning.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a synthetic dataset")
    g.add_argument("--family", type=_family, required=True, help=", ".join(f.value for f in Family))
    g.add_argument("--classes", type=int, default=None)
    g.add_argument("--per-class", type=int, default=1)
    g.add_argument("--length", type=int, default=None)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--format", choices=("bin", "csv"), default=None)
    g.add_argument("--labels", action="store_true", help="write a leading class-id column to CSV output")

    def data_args(p):
        p.add_argument("--format", choices=("bin", "csv"), default=None, help="default: from the file extension")
        p.add_argument("--labels", action="store_true", help="CSV files carry a leading class-id column")

    n = sub.add_parser("nn", help="nearest neighbor of each series in a query file",
                       epilog=f"CSV columns: {NN_COLUMNS}")
    n.add_argument("--db", required=True)
    n.add_argument("--query-file", required=True)
    n.add_argument("--strategy", type=_strategy, default=Strategy.LINEAR_IMPROVED)
    n.add_argument("--p", type=_exponent, default=1.0)
    n.add_argument("--w", default="10%", help="band as samples or 'P%%' of the length")
    n.add_argument("--d", type=int, default=DEFAULT_DIMENSIONS)
    n.add_argument("--early-abandon", action="store_true")
    n.add_argument("--out", default=None)
    data_args(n)

    b = sub.add_parser("bench", help="pruning benchmark over growing database fractions",
                       epilog=f"Queries are held out from --db at random. CSV columns: {BENCH_COLUMNS}")
    b.add_argument("--db", required=True)
    b.add_argument("--queries", type=int, default=20)
    b.add_argument("--fractions", type=_float_list, default=[0.25, 0.5, 0.75, 1.0])
    b.add_argument("--strategies", type=_strategy_list, default=list(Strategy))
    b.add_argument("--p", type=_exponent, default=1.0)
    b.add_argument("--w", default="10%")
    b.add_argument("--d", type=int, default=DEFAULT_DIMENSIONS)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--early-abandon", action="store_true")
    b.add_argument("--out", default=None)
    data_args(b)

    t = sub.add_parser("triangle", help="triangle-inequality violation rate",
                       epilog="CSV columns: family, n, p, trials, violations, violation_rate, degenerate, "
                              "max_ratio, bin_0.0 .. bin_1.9, bin_2.0+")
    t.add_argument("--family", type=_family, default=Family.RANDOM_WALK)
    t.add_argument("--n", type=int, default=100)
    t.add_argument("--trials", type=int, default=10_000)
    t.add_argument("--p", type=_exponent, default=1.0)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out", default=None)

    c = sub.add_parser("classify", help="1-NN classification accuracy for several p",
                       epilog="CSV columns: family, instances_per_class, p, repetitions, queries, accuracy")
    c.add_argument("--family", type=_family, default=Family.CONTROL_CHART)
    c.add_argument("--per-class-range", type=_int_list, default=list(range(1, 10)), help="e.g. 1-9 or 2,9")
    c.add_argument("--p-list", type=_exponent_list, default=[1.0, 2.0, 4.0, math.inf])
    c.add_argument("--reps", type=int, default=10)
    c.add_argument("--queries", type=int, default=100)
    c.add_argument("--w", default="10%")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", default=None)
    return parser


def _emit(rows, out):
    write_csv(rows, out if out else sys.stdout)


def _cmd_gen(args):
    ds = generate_database(args.family, args.classes, args.per_class, args.length, args.seed)
    save_dataset(ds, args.out, args.format, True if args.labels else None)


def _cmd_nn(args):
    db = load_dataset(args.db, args.format, args.labels)
    queries = load_dataset(args.query_file, args.format, args.labels)
    params = SearchParams(p=args.p, w=parse_window(args.w, db.length))
    index = cover = None
    if args.strategy.indexed:
        index, cover = build_index(db, make_cover(db.length, args.d))
    rows = []
    for qi in range(len(queries)):
        out = nearest_neighbor(queries[qi], db, args.strategy, params, index, cover, args.early_abandon)
        rows.append({
            "query": qi,
            "best_id": out.best_id,
            "best_dist": out.best_dist,
            "label": "" if db.labels is None else int(db.labels[out.best_id]),
            "candidates_seen": out.candidates_seen,
            "pruned_by_index": out.pruned_by_index,
            "pruned_by_lb_keogh": out.pruned_by_lb_keogh,
            "pruned_by_lb_improved": out.pruned_by_lb_improved,
            "dtw_evaluations": out.dtw_evaluations,
            "comparisons": "" if out.comparison_count is None else out.comparison_count,
        })
    _emit(rows, args.out)


def _cmd_bench(args):
    db = load_dataset(args.db, args.format, args.labels)
    if not 0 < args.queries < len(db):
        raise UsageError(f"--queries must be between 1 and {len(db) - 1}")
    rng = np.random.default_rng(args.seed)
    held = np.sort(rng.choice(len(db), size=args.queries, replace=False))
    keep = np.setdiff1d(np.arange(len(db)), held)
    search_db = Dataset(db.series[keep])
    params = SearchParams(p=args.p, w=parse_window(args.w, db.length))
    report = run_pruning_bench(search_db, list(db.series[held]), args.strategies, params, args.fractions,
                               args.d, args.early_abandon)
    if not report.agreement:
        logging.error("strategies disagreed on %d (fraction, query) pairs", len(report.mismatches))
    _emit(report.rows(), args.out)


def _cmd_triangle(args):
    report = run_triangle(args.family, args.n, args.trials, args.p, args.seed)
    _emit(report.rows(), args.out)


def _cmd_classify(args):
    n = args.family.default_length
    text = str(args.w).strip()
    fraction = float(text[:-1]) / 100.0 if text.endswith("%") else parse_window(text, n) / n
    report = run_classification(args.family, args.per_class_range, args.p_list, args.reps, args.queries,
                                fraction, args.seed)
    _emit(report.rows(), args.out)


COMMANDS = {
    "gen": _cmd_gen,
    "nn": _cmd_nn,
    "bench": _cmd_bench,
    "triangle": _cmd_triangle,
    "classify": _cmd_classify,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"dtwsearch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidInputError, OSError) as exc:
        print(f"dtwsearch: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
