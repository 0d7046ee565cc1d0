"""Reproduction studies: pruning benchmark, triangle-inequality violations, 1-NN accuracy.

Each study returns a report object whose ``rows()`` feed :func:`write_csv`.
Wall-clock times are informational only.
"""

from __future__ import annotations

import csv
import logging
import math
import sys
import time
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .core import Dataset, InvalidInputError, SearchParams, as_series
from .datagen import Family, GeneratorSpec, generate, generate_database, rng_for, series_seed
from .dtw import dtw
from .reduction import DEFAULT_DIMENSIONS, make_cover
from .search import (
    SearchOutcome,
    Strategy,
    build_index,
    improved_comparison_budget,
    keogh_comparison_budget,
    nearest_neighbor,
    nn_linear_keogh,
)

__all__ = [
    "BenchPoint",
    "BenchReport",
    "TriangleReport",
    "ClassReport",
    "run_pruning_bench",
    "triangle_ratio",
    "run_triangle",
    "run_classification",
    "write_csv",
    "VIOLATION_SLACK",
]

log = logging.getLogger(__name__)

VIOLATION_SLACK = 1e-12
HISTOGRAM_EDGES = tuple(round(0.1 * k, 1) for k in range(21))


def write_csv(rows: List[dict], out=None) -> None:
    """Write report rows (dicts with a stable key order) to a path or stream."""
    if not rows:
        return
    if out is None:
        out = sys.stdout
    if isinstance(out, (str,)) or hasattr(out, "__fspath__"):
        with open(out, "w", newline="") as fh:
            write_csv(rows, fh)
        return
    writer = csv.DictWriter(out, fieldnames=list(rows[0].keys()), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


# -- pruning benchmark -------------------------------------------------------


@dataclass
class BenchPoint:
    fraction: float
    size: int
    strategy: Strategy
    outcomes: List[SearchOutcome]
    seconds: List[float]
    budget_ok: Optional[bool] = None

    def mean(self, attr: str) -> float:
        return float(np.mean([getattr(o, attr) for o in self.outcomes]))

    @property
    def lb_pruned(self) -> int:
        """Candidates discarded by the lower-bound gates (index pruning excluded)."""
        return sum(o.pruned_by_lb_keogh + o.pruned_by_lb_improved for o in self.outcomes)

    def row(self) -> dict:
        comps = [o.comparison_count for o in self.outcomes if o.comparison_count is not None]
        return {
            "fraction": self.fraction,
            "database_size": self.size,
            "strategy": self.strategy.value,
            "queries": len(self.outcomes),
            "candidates_seen": self.mean("candidates_seen"),
            "dtw_evaluations": self.mean("dtw_evaluations"),
            "pruned_by_index": self.mean("pruned_by_index"),
            "pruned_by_lb_keogh": self.mean("pruned_by_lb_keogh"),
            "pruned_by_lb_improved": self.mean("pruned_by_lb_improved"),
            "pruning_fraction": self.mean("pruning_fraction"),
            "comparisons": float(np.mean(comps)) if comps else "",
            "budget_ok": "" if self.budget_ok is None else self.budget_ok,
            "seconds": float(np.mean(self.seconds)),
        }


@dataclass
class BenchReport:
    params: SearchParams
    points: List[BenchPoint] = field(default_factory=list)
    mismatches: List[Tuple[float, int]] = field(default_factory=list)

    @property
    def agreement(self) -> bool:
        return not self.mismatches

    def point(self, fraction: float, strategy: Strategy) -> BenchPoint:
        for pt in self.points:
            if pt.strategy is strategy and math.isclose(pt.fraction, fraction):
                return pt
        raise KeyError((fraction, strategy))

    def lb_pruning_ratio(self, fraction: float = 1.0, indexed: bool = True) -> float:
        """Candidates pruned by the LB_Improved cascade over those pruned by LB_Keogh alone."""
        if indexed:
            better, base = Strategy.TREE_IMPROVED, Strategy.TREE_KEOGH
        else:
            better, base = Strategy.LINEAR_IMPROVED, Strategy.LINEAR_KEOGH
        denom = self.point(fraction, base).lb_pruned
        num = self.point(fraction, better).lb_pruned
        return math.inf if denom == 0 else num / denom

    def rows(self) -> List[dict]:
        return [pt.row() for pt in self.points]


def _budget_ok(strategy: Strategy, outcome: SearchOutcome, n: int) -> Optional[bool]:
    if outcome.comparison_count is None:
        return None
    count = outcome.candidates_seen
    if strategy is Strategy.LINEAR_KEOGH:
        return outcome.comparison_count <= keogh_comparison_budget(count, n)
    return outcome.comparison_count <= improved_comparison_budget(count, n, outcome.first_pass_pruned_fraction)


def run_pruning_bench(
    db: Dataset,
    queries: Sequence,
    strategies: Iterable[Strategy] = tuple(Strategy),
    params: Optional[SearchParams] = None,
    fractions: Iterable[float] = (1.0,),
    d: int = DEFAULT_DIMENSIONS,
    early_abandon: bool = False,
) -> BenchReport:
    """Search growing prefixes of ``db`` with every strategy and average the counters."""
    if len(db) == 0:
        raise InvalidInputError("empty database")
    queries = [as_series(q, "query") for q in queries]
    if not queries:
        raise InvalidInputError("no queries")
    if any(q.shape[0] != db.length for q in queries):
        raise InvalidInputError("query length differs from database length")
    strategies = list(strategies)
    if params is None:
        params = SearchParams.from_percent(db.length, 10.0)
    cover = make_cover(db.length, d)
    report = BenchReport(params)
    for f in fractions:
        if f <= 0:
            log.warning("skipping database fraction %s", f)
            continue
        size = min(len(db), int(math.ceil(f * len(db) - 1e-9)))
        sub = db.head(size)
        index = None
        if any(s.indexed for s in strategies):
            index, _ = build_index(sub, cover)
        results: Dict[Strategy, BenchPoint] = {s: BenchPoint(f, size, s, [], []) for s in strategies}
        for qi, q in enumerate(queries):
            dists = []
            for s in strategies:
                t0 = time.perf_counter()
                out = nearest_neighbor(q, sub, s, params, index, cover, early_abandon)
                results[s].seconds.append(time.perf_counter() - t0)
                results[s].outcomes.append(out)
                ok = _budget_ok(s, out, db.length)
                if ok is not None:
                    results[s].budget_ok = ok if results[s].budget_ok is None else (results[s].budget_ok and ok)
                dists.append((out.best_id, out.best_dist))
            if len(set(dists)) > 1:
                report.mismatches.append((f, qi))
        report.points.extend(results.values())
    return report


# -- triangle inequality -----------------------------------------------------


def triangle_ratio(x, y, z, params: SearchParams) -> Optional[float]:
    """``dtw(x, z) / (dtw(x, y) + dtw(y, z))``, or ``None`` when that is 0/0."""
    dxz = dtw(x, z, params)
    denom = dtw(x, y, params) + dtw(y, z, params)
    if denom == 0.0:
        return None if dxz == 0.0 else math.inf
    return dxz / denom


@dataclass
class TriangleReport:
    family: Family
    n: int
    p: float
    trials: int
    violation_count: int
    degenerate_count: int
    histogram: List[int]
    max_ratio: float

    @property
    def violation_rate(self) -> float:
        return self.violation_count / self.trials if self.trials else 0.0

    def rows(self) -> List[dict]:
        row = {
            "family": self.family.value,
            "n": self.n,
            "p": self.p,
            "trials": self.trials,
            "violations": self.violation_count,
            "violation_rate": self.violation_rate,
            "degenerate": self.degenerate_count,
            "max_ratio": self.max_ratio,
        }
        for k, count in enumerate(self.histogram):
            label = f"bin_{HISTOGRAM_EDGES[k]:.1f}" if k < len(HISTOGRAM_EDGES) - 1 else "bin_2.0+"
            row[label] = count
        return [row]


def _random_member(family: Family, n: int, seed: int, trial: int, slot: int) -> np.ndarray:
    class_id = None
    if family.classes:
        class_id = int(rng_for(seed, 1, trial, slot).integers(1, family.classes + 1))
    return generate(GeneratorSpec(family, class_id, n, series_seed(seed, family, class_id or 0, 3 * trial + slot)))


def run_triangle(family, n: int, trials: int, p: float, seed: int = 0, w: Optional[int] = None) -> TriangleReport:
    """Histogram of the triangle ratio over random triples; DTW unconstrained by default."""
    fam = family if isinstance(family, Family) else Family.parse(family)
    if trials < 1:
        raise InvalidInputError("trials must be >= 1")
    params = SearchParams(p=p, w=n if w is None else w)
    hist = [0] * len(HISTOGRAM_EDGES)
    violations = degenerate = 0
    max_ratio = 0.0
    for t in range(trials):
        x, y, z = (_random_member(fam, n, seed, t, slot) for slot in range(3))
        c = triangle_ratio(x, y, z, params)
        if c is None:
            degenerate += 1
            continue
        max_ratio = max(max_ratio, c)
        if c > 1.0 + VIOLATION_SLACK:
            violations += 1
        hist[min(int(c / 0.1), len(hist) - 1)] += 1
    return TriangleReport(fam, n, params.p, trials, violations, degenerate, hist, max_ratio)


# -- classification ----------------------------------------------------------


@dataclass
class ClassReport:
    family: Family
    repetitions: int
    queries_per_rep: int
    accuracy: Dict[Tuple[int, float], float]

    def at(self, instances_per_class: int, p: float) -> float:
        return self.accuracy[(instances_per_class, float(p))]

    def rows(self) -> List[dict]:
        return [
            {
                "family": self.family.value,
                "instances_per_class": k,
                "p": p,
                "repetitions": self.repetitions,
                "queries": self.queries_per_rep,
                "accuracy": acc,
            }
            for (k, p), acc in sorted(self.accuracy.items())
        ]


def run_classification(
    family,
    instance_counts: Iterable[int],
    p_list: Iterable[float] = (1.0, 2.0, 4.0, math.inf),
    repetitions: int = 10,
    queries_per_rep: int = 100,
    w_fraction: float = 0.1,
    seed: int = 0,
    classes: Optional[int] = None,
) -> ClassReport:
    """Mean 1-NN accuracy under DTW_p for databases of increasing size per class."""
    fam = family if isinstance(family, Family) else Family.parse(family)
    classes = classes or fam.classes or 1
    n = fam.default_length
    w = int(math.floor(n * w_fraction + 1e-9))
    p_list = [float(p) for p in p_list]
    acc: Dict[Tuple[int, float], float] = {}
    for count in instance_counts:
        hits = {p: 0 for p in p_list}
        total = 0
        for rep in range(repetitions):
            rep_seed = series_seed(seed, fam, count, rep)
            db = generate_database(fam, classes, count, n, seed=rep_seed)
            rng = rng_for(rep_seed, 2)
            for q in range(queries_per_rep):
                label = int(rng.integers(1, classes + 1))
                cid = label if fam.classes else None
                query = generate(GeneratorSpec(fam, cid, n, int(rng.integers(0, 2**63))))
                total += 1
                for p in p_list:
                    out = nn_linear_keogh(query, db, SearchParams(p=p, w=w))
                    hits[p] += int(db.labels[out.best_id] == label)
        for p in p_list:
            acc[(int(count), p)] = hits[p] / total if total else 0.0
    return ClassReport(fam, repetitions, queries_per_rep, acc)
