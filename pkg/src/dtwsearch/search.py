"""Exact 1-NN retrieval under DTW with lower-bound cascades.

Linear scans:

* ``LINEAR_KEOGH``: envelope of the query once, LB_Keogh per candidate,
  DTW only when the bound is below the best distance so far.
* ``LINEAR_IMPROVED``: as above, then a second pass comparing the query
  against the envelope of the candidate's projection before any DTW.

Indexed (``p = 1`` only), over an R*-tree of piecewise sums:

* ``TREE_ONLY``: DTW on every candidate the tree yields below the cutoff.
* ``TREE_KEOGH``: LB_Keogh gate before DTW.
* ``TREE_IMPROVED``: LB_Keogh then LB_Improved gates before DTW.

Throughout, the candidate series ``x`` is compared to the query ``y`` and
DTW is evaluated as ``dtw(query, candidate)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bounds import keogh_kernel
from .core import (
    Dataset,
    EmptyDatabaseError,
    InvalidInputError,
    SearchParams,
    UnsupportedExponentError,
    as_series,
)
from .dtw import dtw_kernel, exponent_code
from .envelope import envelope_streaming, streaming_envelope_kernel
from .reduction import DEFAULT_DIMENSIONS, PiecewiseCover, envelope_rect, make_cover, project_rows
from .rtree import RTreeIndex

__all__ = [
    "Strategy",
    "SearchOutcome",
    "nn_exhaustive",
    "nn_linear_keogh",
    "nn_linear_improved",
    "nn_indexed",
    "build_index",
    "nearest_neighbor",
    "keogh_comparison_budget",
    "improved_comparison_budget",
]


class Strategy(enum.Enum):
    LINEAR_KEOGH = "linear-keogh"
    LINEAR_IMPROVED = "linear-improved"
    TREE_ONLY = "tree"
    TREE_KEOGH = "tree-keogh"
    TREE_IMPROVED = "tree-improved"

    @property
    def indexed(self) -> bool:
        return self in (Strategy.TREE_ONLY, Strategy.TREE_KEOGH, Strategy.TREE_IMPROVED)


@dataclass
class SearchOutcome:
    best_id: int
    best_dist: float
    candidates_seen: int = 0
    pruned_by_index: int = 0
    pruned_by_lb_keogh: int = 0
    pruned_by_lb_improved: int = 0
    dtw_evaluations: int = 0
    comparison_count: Optional[int] = None
    strategy: Optional[Strategy] = field(default=None, compare=False)

    @property
    def pruned(self) -> int:
        return self.candidates_seen - self.dtw_evaluations

    @property
    def pruning_fraction(self) -> float:
        if self.candidates_seen == 0:
            return 0.0
        return 1.0 - self.dtw_evaluations / self.candidates_seen

    @property
    def first_pass_pruned_fraction(self) -> float:
        """Share of candidates discarded by the LB_Keogh gate alone."""
        if self.candidates_seen == 0:
            return 0.0
        return self.pruned_by_lb_keogh / self.candidates_seen


def keogh_comparison_budget(count: int, n: int) -> int:
    """Upper bound on data-point comparisons of an LB_Keogh scan over ``count`` series."""
    return (2 * count + 3) * n


def improved_comparison_budget(count: int, n: int, alpha: float) -> float:
    """Same for the two-pass scan, where ``alpha`` is the first-pass pruned fraction."""
    return (2 * count + 3) * n + 5 * (1.0 - alpha) * count * n


def _root(acc: float, p: float) -> float:
    if p == 1.0 or math.isinf(p):
        return acc
    if p == 2.0:
        return math.sqrt(acc)
    return acc ** (1.0 / p)


def _power(b: float, p: float) -> float:
    if p == 1.0 or math.isinf(p):
        return b
    return b**p


def _prepare(query, db: Dataset):
    query = as_series(query, "query")
    if len(db) == 0:
        raise EmptyDatabaseError("empty database")
    if db.length != query.shape[0]:
        raise InvalidInputError(f"query length {query.shape[0]} != database length {db.length}")
    return query, np.ascontiguousarray(db.series)


def nn_exhaustive(query, db: Dataset, params: SearchParams) -> SearchOutcome:
    """DTW against every member; the reference answer for the cascades."""
    query, rows = _prepare(query, db)
    w = params.band(query.shape[0])
    pc = exponent_code(params.p)
    costs = np.array([dtw_kernel(query, rows[k], w, pc) for k in range(rows.shape[0])])
    best = int(np.argmin(costs))
    return SearchOutcome(
        best_id=best,
        best_dist=_root(float(costs[best]), params.p),
        candidates_seen=rows.shape[0],
        dtw_evaluations=rows.shape[0],
    )


def nn_linear_keogh(query, db: Dataset, params: SearchParams, early_abandon: bool = False) -> SearchOutcome:
    query, rows = _prepare(query, db)
    p = params.p
    pc = exponent_code(p)
    n = query.shape[0]
    w = params.band(n)
    env, comparisons = envelope_streaming(query, w, return_count=True)
    upper, lower = env.upper, env.lower
    h = np.empty(n)
    b = math.inf
    best = -1
    out = SearchOutcome(best_id=-1, best_dist=math.inf, strategy=Strategy.LINEAR_KEOGH)
    for k in range(rows.shape[0]):
        x = rows[k]
        out.candidates_seen += 1
        limit = _power(b, p) if early_abandon else math.inf
        acc, _, cmp = keogh_kernel(x, upper, lower, pc, limit, h)
        comparisons += cmp
        if _root(acc, p) < b:
            out.dtw_evaluations += 1
            t = _root(dtw_kernel(query, x, w, pc), p)
            if t < b:
                b, best = t, k
        else:
            out.pruned_by_lb_keogh += 1
    out.best_id, out.best_dist, out.comparison_count = best, b, int(comparisons)
    return out


def nn_linear_improved(query, db: Dataset, params: SearchParams, early_abandon: bool = False) -> SearchOutcome:
    p = params.p
    if math.isinf(p):
        raise UnsupportedExponentError("LB_Improved scans need a finite p")
    query, rows = _prepare(query, db)
    n = query.shape[0]
    w = params.band(n)
    env, comparisons = envelope_streaming(query, w, return_count=True)
    upper, lower = env.upper, env.lower
    h = np.empty(n)
    hu = np.empty(n)
    hl = np.empty(n)
    scratch = np.empty(n)
    b = math.inf
    best = -1
    out = SearchOutcome(best_id=-1, best_dist=math.inf, strategy=Strategy.LINEAR_IMPROVED)
    for k in range(rows.shape[0]):
        x = rows[k]
        out.candidates_seen += 1
        limit = _power(b, p) if early_abandon else math.inf
        acc, _, cmp = keogh_kernel(x, upper, lower, p, limit, h)
        comparisons += cmp
        if not _root(acc, p) < b:
            out.pruned_by_lb_keogh += 1
            continue
        comparisons += streaming_envelope_kernel(h, w, hu, hl)
        acc2, _, cmp = keogh_kernel(query, hu, hl, p, limit - acc, scratch)
        comparisons += cmp
        if not _root(acc + acc2, p) < b:
            out.pruned_by_lb_improved += 1
            continue
        out.dtw_evaluations += 1
        t = _root(dtw_kernel(query, x, w, p), p)
        if t < b:
            b, best = t, k
    out.best_id, out.best_dist, out.comparison_count = best, b, int(comparisons)
    return out


def build_index(db: Dataset, cover: Optional[PiecewiseCover] = None, **tree_kwargs):
    """Project every member with ``cover`` and index the points."""
    if cover is None:
        cover = make_cover(db.length, min(DEFAULT_DIMENSIONS, db.length))
    index = RTreeIndex.build(project_rows(db.series, cover), **tree_kwargs) if len(db) else RTreeIndex(cover.d)
    return index, cover


def nn_indexed(
    query,
    db: Dataset,
    index: RTreeIndex,
    cover: PiecewiseCover,
    cascade: Strategy,
    params: SearchParams,
    early_abandon: bool = False,
) -> SearchOutcome:
    """Best-first search over the R*-tree with a shrinking cutoff.

    On exact distance ties the lowest id wins, so the stream is consumed
    inclusively at the cutoff.
    """
    if not cascade.indexed:
        raise InvalidInputError(f"{cascade.value} is not an indexed strategy")
    if params.p != 1.0:
        raise UnsupportedExponentError("indexed search is defined for p = 1 only")
    query, rows = _prepare(query, db)
    n = query.shape[0]
    if cover.n != n or index.d != cover.d:
        raise InvalidInputError("index/cover do not match the database")
    if len(index) != rows.shape[0]:
        raise InvalidInputError(f"index holds {len(index)} points, database has {rows.shape[0]}")
    w = params.band(n)
    env = envelope_streaming(query, w)
    upper, lower = env.upper, env.lower
    h = np.empty(n)
    hu = np.empty(n)
    hl = np.empty(n)
    scratch = np.empty(n)
    b = math.inf
    best = -1
    out = SearchOutcome(best_id=-1, best_dist=math.inf, candidates_seen=rows.shape[0], strategy=cascade)
    stream = index.candidates(envelope_rect(env, cover), inclusive=True)
    yielded = 0

    def passes(bound, ident):
        return bound < b or (bound == b and ident < best)

    for ident, _ in stream:
        yielded += 1
        x = rows[ident]
        if cascade is not Strategy.TREE_ONLY:
            limit = b if early_abandon else math.inf
            acc, _, _ = keogh_kernel(x, upper, lower, 1.0, limit, h)
            if not passes(acc, ident):
                out.pruned_by_lb_keogh += 1
                continue
            if cascade is Strategy.TREE_IMPROVED:
                streaming_envelope_kernel(h, w, hu, hl)
                acc2, _, _ = keogh_kernel(query, hu, hl, 1.0, limit - acc, scratch)
                if not passes(acc + acc2, ident):
                    out.pruned_by_lb_improved += 1
                    continue
        out.dtw_evaluations += 1
        t = dtw_kernel(query, x, w, 1.0)
        if passes(t, ident):
            b, best = t, ident
            stream.cutoff = b
    out.pruned_by_index = rows.shape[0] - yielded
    out.best_id, out.best_dist = best, b
    return out


def nearest_neighbor(
    query,
    db: Dataset,
    strategy: Strategy,
    params: SearchParams,
    index: Optional[RTreeIndex] = None,
    cover: Optional[PiecewiseCover] = None,
    early_abandon: bool = False,
) -> SearchOutcome:
    """Dispatch to the scan or indexed search named by ``strategy``."""
    if strategy is Strategy.LINEAR_KEOGH:
        return nn_linear_keogh(query, db, params, early_abandon)
    if strategy is Strategy.LINEAR_IMPROVED:
        return nn_linear_improved(query, db, params, early_abandon)
    if index is None:
        index, cover = build_index(db, cover)
    elif cover is None:
        raise InvalidInputError("an index needs the cover it was built with")
    return nn_indexed(query, db, index, cover, strategy, params, early_abandon)
