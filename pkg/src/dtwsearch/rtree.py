"""In-memory R*-tree over projected points with a best-first l1 candidate stream.

Insertion follows Beckmann et al.: choose-subtree by least overlap
enlargement just above the leaves (least area enlargement higher up),
forced reinsertion of the 30% farthest entries on the first overflow at
each level, and the margin/overlap based split.
"""

from __future__ import annotations

import heapq
import itertools
import math
from typing import Iterator, List, Optional, Tuple

import numpy as np

from .core import InvalidInputError
from .reduction import Hyperrectangle

__all__ = ["RTreeIndex", "CandidateStream"]


class _Point:
    __slots__ = ("lo", "ident")

    def __init__(self, coords: np.ndarray, ident: int):
        self.lo = coords
        self.ident = ident

    @property
    def hi(self) -> np.ndarray:
        return self.lo


class _Node:
    __slots__ = ("level", "children", "lo", "hi")

    def __init__(self, level: int, children: list):
        self.level = level
        self.children = children
        self.recompute()

    def recompute(self):
        if self.children:
            self.lo = np.min([c.lo for c in self.children], axis=0)
            self.hi = np.max([c.hi for c in self.children], axis=0)
        else:
            self.lo = self.hi = None

    def extend(self, item):
        if self.lo is None:
            self.lo = item.lo.copy()
            self.hi = item.hi.copy()
        else:
            self.lo = np.minimum(self.lo, item.lo)
            self.hi = np.maximum(self.hi, item.hi)


def _volume(lo, hi):
    return np.prod(hi - lo, axis=-1)


def _margin(lo, hi):
    return np.sum(hi - lo, axis=-1)


def _overlap(alo, ahi, blo, bhi):
    side = np.minimum(ahi, bhi) - np.maximum(alo, blo)
    return np.prod(np.clip(side, 0.0, None), axis=-1)


def _gap_l1(qlo, qhi, lo, hi):
    """Interval-to-interval l1 gap, zero on overlap; broadcasts over rows."""
    return np.sum(np.maximum(qlo - hi, 0.0) + np.maximum(lo - qhi, 0.0), axis=-1)


class RTreeIndex:
    """R*-tree holding ``(point, id)`` pairs in ``d`` dimensions."""

    def __init__(self, dimensions: int, max_entries: int = 32, min_fill: float = 0.4, reinsert_fraction: float = 0.3):
        if dimensions < 1:
            raise InvalidInputError("dimensions must be >= 1")
        if max_entries < 4:
            raise InvalidInputError("max_entries must be >= 4")
        self.d = int(dimensions)
        self.max_entries = int(max_entries)
        self.min_entries = max(2, int(math.floor(min_fill * max_entries)))
        self.reinsert_count = max(1, int(reinsert_fraction * max_entries))
        self.root = _Node(0, [])
        self._size = 0
        self._reinserted: set = set()

    @classmethod
    def build(cls, points, ids=None, **kwargs) -> "RTreeIndex":
        """Index ``points`` (shape ``(N, d)``) by repeated insertion."""
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2:
            raise InvalidInputError(f"points must form a 2-D array, got shape {pts.shape}")
        if ids is None:
            ids = range(pts.shape[0])
        ids = list(ids)
        if len(ids) != pts.shape[0]:
            raise InvalidInputError("one id per point required")
        tree = cls(max(pts.shape[1], 1), **kwargs)
        for row, ident in zip(pts, ids):
            tree.insert(row, ident)
        return tree

    def __len__(self) -> int:
        return self._size

    @property
    def height(self) -> int:
        return self.root.level + 1

    def insert(self, point, ident: int) -> None:
        coords = np.array(point, dtype=np.float64).reshape(-1)
        if coords.shape[0] != self.d:
            raise InvalidInputError(f"point has dimension {coords.shape[0]}, index has {self.d}")
        self._reinserted = set()
        self._insert(_Point(coords, int(ident)), 0)
        self._size += 1

    def _insert(self, item, level: int) -> None:
        path = [self.root]
        node = self.root
        while node.level > level:
            node = self._choose_subtree(node, item)
            path.append(node)
        node.children.append(item)
        for anc in path:
            anc.extend(item)
        self._overflow(path)

    def _choose_subtree(self, node: _Node, item) -> _Node:
        kids = node.children
        lo = np.array([c.lo for c in kids])
        hi = np.array([c.hi for c in kids])
        elo = np.minimum(lo, item.lo)
        ehi = np.maximum(hi, item.hi)
        area = _volume(lo, hi)
        enlarge = _volume(elo, ehi) - area
        if node.level == 1:
            before = _overlap(lo[:, None, :], hi[:, None, :], lo[None, :, :], hi[None, :, :])
            after = _overlap(elo[:, None, :], ehi[:, None, :], lo[None, :, :], hi[None, :, :])
            np.fill_diagonal(before, 0.0)
            np.fill_diagonal(after, 0.0)
            growth = after.sum(axis=1) - before.sum(axis=1)
            order = np.lexsort((area, enlarge, growth))
        else:
            order = np.lexsort((area, enlarge))
        return kids[int(order[0])]

    def _overflow(self, path: List[_Node]) -> None:
        depth = len(path) - 1
        while depth >= 0:
            node = path[depth]
            if len(node.children) <= self.max_entries:
                return
            if depth > 0 and node.level not in self._reinserted:
                self._reinserted.add(node.level)
                removed = self._take_farthest(node)
                for anc in reversed(path[:depth]):
                    anc.recompute()
                for item in removed:
                    self._insert(item, node.level)
                return
            sibling = self._split(node)
            if depth == 0:
                self.root = _Node(node.level + 1, [node, sibling])
                return
            parent = path[depth - 1]
            parent.children.append(sibling)
            parent.recompute()
            depth -= 1

    def _take_farthest(self, node: _Node) -> list:
        kids = node.children
        centers = np.array([(c.lo + c.hi) * 0.5 for c in kids])
        mid = (node.lo + node.hi) * 0.5
        dist = np.sum((centers - mid) ** 2, axis=1)
        order = np.argsort(-dist, kind="stable")
        far = set(order[: self.reinsert_count].tolist())
        # close reinsert: nearest of the removed entries goes back first
        removed = [kids[i] for i in reversed(order[: self.reinsert_count])]
        node.children = [c for i, c in enumerate(kids) if i not in far]
        node.recompute()
        return removed

    def _split(self, node: _Node) -> _Node:
        kids = node.children
        lo = np.array([c.lo for c in kids])
        hi = np.array([c.hi for c in kids])
        total = len(kids)
        m = self.min_entries
        ks = np.arange(m, total - m + 1)

        def distributions(order):
            slo, shi = lo[order], hi[order]
            plo = np.minimum.accumulate(slo, axis=0)
            phi = np.maximum.accumulate(shi, axis=0)
            qlo = np.minimum.accumulate(slo[::-1], axis=0)[::-1]
            qhi = np.maximum.accumulate(shi[::-1], axis=0)[::-1]
            # group one = first k entries
            return plo[ks - 1], phi[ks - 1], qlo[ks], qhi[ks]

        best_axis, best_margin, candidates = None, np.inf, None
        for axis in range(self.d):
            # by lower then upper corner, and by upper then lower
            sorts = [np.lexsort((hi[:, axis], lo[:, axis])), np.lexsort((lo[:, axis], hi[:, axis]))]
            dists = [distributions(o) for o in sorts]
            margin = sum(float(np.sum(_margin(a, b) + _margin(c, e))) for a, b, c, e in dists)
            if margin < best_margin:
                best_axis, best_margin, candidates = axis, margin, list(zip(sorts, dists))

        best = None
        for order, (alo, ahi, blo, bhi) in candidates:
            overlap = _overlap(alo, ahi, blo, bhi)
            area = _volume(alo, ahi) + _volume(blo, bhi)
            r = int(np.lexsort((area, overlap))[0])
            key = (overlap[r], area[r])
            if best is None or key < best[0]:
                best = (key, order, int(ks[r]))
        _, order, k = best
        node.children = [kids[i] for i in order[:k]]
        node.recompute()
        return _Node(node.level, [kids[i] for i in order[k:]])

    def candidates(self, query: Hyperrectangle, cutoff: float = math.inf, inclusive: bool = False) -> "CandidateStream":
        """Stream stored ids by nondecreasing l1 distance to ``query``."""
        if query.d != self.d:
            raise InvalidInputError(f"query has dimension {query.d}, index has {self.d}")
        return CandidateStream(self, query, cutoff, inclusive)

    def items(self) -> Iterator[Tuple[int, np.ndarray]]:
        stack = [self.root]
        while stack:
            node = stack.pop()
            for c in node.children:
                if isinstance(c, _Point):
                    yield c.ident, c.lo
                else:
                    stack.append(c)

    def check_invariants(self) -> None:
        """Raise ``AssertionError`` if containment, fill or balance is violated."""

        def visit(node: _Node, is_root: bool):
            count = len(node.children)
            assert count <= self.max_entries, "node over capacity"
            if not is_root:
                assert count >= self.min_entries, f"node under-filled ({count})"
            for c in node.children:
                assert np.all(node.lo <= c.lo) and np.all(c.hi <= node.hi), "child escapes parent rectangle"
                if isinstance(c, _Point):
                    assert node.level == 0, "point stored above leaf level"
                else:
                    assert c.level == node.level - 1, "unbalanced tree"
                    visit(c, False)

        if self._size:
            visit(self.root, True)
        assert sum(1 for _ in self.items()) == self._size


class CandidateStream:
    """Best-first iterator of ``(id, dist)`` pairs.

    Entries at distance ``>= cutoff`` (``> cutoff`` when ``inclusive``) are
    never produced. ``cutoff`` may be lowered between calls to ``next``;
    once the queue minimum passes it the stream is exhausted.
    """

    def __init__(self, tree: RTreeIndex, query: Hyperrectangle, cutoff: float = math.inf, inclusive: bool = False):
        self._qlo = query.lo
        self._qhi = query.hi
        self.cutoff = cutoff
        self.inclusive = inclusive
        self._tick = itertools.count()
        self._heap: list = []
        self.nodes_visited = 0
        if len(tree):
            root = tree.root
            heapq.heappush(self._heap, (float(_gap_l1(self._qlo, self._qhi, root.lo, root.hi)), next(self._tick), root))

    def __iter__(self):
        return self

    def _beyond(self, dist: float) -> bool:
        return dist > self.cutoff if self.inclusive else dist >= self.cutoff

    def __next__(self) -> Tuple[int, float]:
        heap = self._heap
        while heap:
            dist, _, item = heap[0]
            if self._beyond(dist):
                heap.clear()
                break
            heapq.heappop(heap)
            if isinstance(item, _Point):
                return item.ident, dist
            self.nodes_visited += 1
            kids = item.children
            lo = np.array([c.lo for c in kids])
            hi = lo if item.level == 0 else np.array([c.hi for c in kids])
            gaps = _gap_l1(self._qlo, self._qhi, lo, hi)
            for g, c in zip(gaps.tolist(), kids):
                if not self._beyond(g):
                    heapq.heappush(heap, (g, next(self._tick), c))
        raise StopIteration
