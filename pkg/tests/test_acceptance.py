"""Acceptance suite: one test, and one PASS/FAIL summary line, per criterion."""

import math

import numpy as np
import pytest

from dtwsearch.bounds import lb_improved, lb_keogh, project
from dtwsearch.core import Dataset, SearchParams, lp_dist
from dtwsearch.datagen import Family, generate_database
from dtwsearch.dtw import dtw, dtw_bruteforce
from dtwsearch.envelope import envelope_naive, envelope_streaming
from dtwsearch.experiments import run_classification, run_pruning_bench, run_triangle
from dtwsearch.reduction import make_cover
from dtwsearch.search import (
    Strategy,
    build_index,
    improved_comparison_budget,
    keogh_comparison_budget,
    nearest_neighbor,
    nn_exhaustive,
)

TOL = 1e-9
INF = math.inf
pytestmark = pytest.mark.acceptance


def close(a, b, tol=TOL):
    return abs(a - b) <= tol


def test_c01_oracle_equivalence(record):
    rng = np.random.default_rng(101)
    bad = 0
    cases = 10_000
    for _ in range(cases):
        n = int(rng.integers(1, 7))
        x = rng.integers(-2, 3, n).astype(float)
        y = rng.integers(-2, 3, n).astype(float)
        w = int(rng.integers(0, n + 1))
        p = (1.0, 2.0, INF)[int(rng.integers(0, 3))]
        params = SearchParams(p, w)
        bad += not close(dtw(x, y, params), dtw_bruteforce(x, y, params))
    ok = record(1, "dtw == brute force", bad == 0, f"{bad} mismatches in {cases} instances (n<=6, tol 1e-9)")
    assert ok


def test_c02_envelope(record):
    rng = np.random.default_rng(102)
    mismatches = over = 0
    worst = 0.0
    cases = 10_000
    for _ in range(cases):
        n = int(rng.integers(1, 200))
        y = rng.standard_normal(n) if rng.random() < 0.5 else np.cumsum(rng.standard_normal(n))
        w = int(rng.integers(0, n + 5))
        fast, count = envelope_streaming(y, w, return_count=True)
        slow = envelope_naive(y, w)
        mismatches += not (np.array_equal(fast.upper, slow.upper) and np.array_equal(fast.lower, slow.lower))
        over += count > 3 * n
        worst = max(worst, count / (3 * n))
    ok = mismatches == 0 and over == 0
    record(2, "streaming envelope", ok,
           f"{mismatches} mismatches, {over} over 3n in {cases} cases (max count/3n = {worst:.3f})")
    assert ok


def test_c03_bound_chain(record):
    rng = np.random.default_rng(103)
    chain = err = 0
    cases = 10_000
    for _ in range(cases):
        n = int(rng.integers(1, 64))
        x, y = np.cumsum(rng.standard_normal((2, n)), axis=1)
        w = int(rng.integers(0, n + 1))
        p = (1.0, 2.0, 4.0)[int(rng.integers(0, 3))]
        env = envelope_streaming(y, w)
        k = lb_keogh(x, env, p)
        i = lb_improved(x, y, env, p)
        d = dtw(x, y, SearchParams(p, w))
        chain += not (0 <= k <= i + TOL and i <= d + TOL)
        err += not (d - k <= lp_dist(project(x, env), y, p) + TOL)
    ok = chain == 0 and err == 0
    record(3, "bound chain", ok, f"{chain} chain violations, {err} error-bound violations in {cases} cases")
    assert ok


def test_c04_fixtures(record):
    checks = {}
    full = SearchParams(2.0, 10)
    checks["sqrt17"] = close(dtw([0, 0, 1, 0], [2, 3, 2, 2], full), math.sqrt(17))
    for p in (1.0, 2.0, 4.0):
        checks[f"ramp p={p:g}"] = close(dtw([0, 1, 2], [1, 2, 3], SearchParams(p, 10)), 2 ** (1 / p)) and close(
            lp_dist([0, 1, 2], [1, 2, 3], p), 3 ** (1 / p)
        )
    z = [7, 7, 7, 0]
    checks["max-norm 5/1"] = dtw(z, [7, 0, 5, 0], SearchParams(INF, 10)) == 5 and dtw(
        z, [7, 0, 1, 0], SearchParams(INF, 10)
    ) == 1
    m, eps = 4, 1.0
    X = np.zeros(2 * m + 1)
    Y = np.zeros(2 * m + 1)
    Y[m] = eps
    Z = np.r_[0.0, np.full(2 * m - 1, eps), 0.0]
    w = m - 1
    for p in (1.0, 2.0):
        params = SearchParams(p, w)
        xy, yz, xz = dtw(X, Y, params), dtw(Y, Z, params), dtw(X, Z, params)
        factor = min(2 * w + 1, len(X)) ** (1 / p)
        checks[f"XYZ p={p:g}"] = (
            close(xy, abs(eps)) and close(yz, 0.0) and close(xz, (2 * m - 1) ** (1 / p) * abs(eps))
            and close(xy + yz, xz / factor)
        )
    failed = [k for k, v in checks.items() if not v]
    ok = not failed
    record(4, "exact fixtures", ok, f"{len(checks) - len(failed)}/{len(checks)} fixtures exact" +
           (f"; failed {failed}" if failed else ""))
    assert ok


def test_c05_weak_triangle(record):
    rng = np.random.default_rng(105)
    bad = 0
    tally = {"finite p": [0, 0], "p=inf, w>=n-1": [0, 0], "p=inf, w<n-1": [0, 0]}
    cases = 10_000
    for t in range(cases):
        n = int(rng.integers(1, 60))
        if t % 2:
            x, y, z = rng.standard_normal((3, n))
        else:
            x, y, z = np.cumsum(rng.standard_normal((3, n)), axis=1)
        w = (0, n // 10, n)[int(rng.integers(0, 3))]
        p = (1.0, 2.0, 4.0, INF)[int(rng.integers(0, 4))]
        params = SearchParams(p, w)
        lhs = dtw(x, y, params) + dtw(y, z, params)
        xz = dtw(x, z, params)
        rhs = xz if math.isinf(p) else xz / min(2 * w + 1, n) ** (1 / p)
        miss = lhs < rhs - TOL
        bad += miss
        key = "finite p" if not math.isinf(p) else ("p=inf, w>=n-1" if w >= n - 1 else "p=inf, w<n-1")
        tally[key][0] += miss
        tally[key][1] += 1
    ok = bad == 0
    split = ", ".join(f"{k}: {v[0]}/{v[1]}" for k, v in tally.items())
    record(5, "weak triangle inequality", ok, f"{bad} violations in {cases} triples, w in {{0, n/10, n}} ({split})")
    assert ok


def test_c06_violation_rates(record):
    trials = 10_000
    plan = [
        (Family.RANDOM_WALK, 1.0, 0.10, 0.30),
        (Family.RANDOM_WALK, 2.0, 0.07, 0.25),
        (Family.WHITE_NOISE, 1.0, 0.0, 0.001),
        (Family.WHITE_NOISE, 2.0, 0.0, 0.001),
        (Family.CBF, 1.0, 0.0, 0.001),
        (Family.CBF, 2.0, 0.0, 0.001),
    ]
    parts, ok = [], True
    for fam, p, lo, hi in plan:
        rate = run_triangle(fam, 100, trials, p, seed=6).violation_rate
        good = lo <= rate <= hi
        ok &= good
        parts.append(f"{fam.value} p={p:g} {rate:.4f} in [{lo}, {hi}]{'' if good else ' NO'}")
    record(6, "triangle violation rates", ok, "; ".join(parts))
    assert ok


@pytest.fixture(scope="module")
def walk_bench():
    db = generate_database(Family.RANDOM_WALK, 1, 5000, 256, seed=7)
    queries = list(generate_database(Family.RANDOM_WALK, 1, 20, 256, seed=7, instance_offset=5000).series)
    params = SearchParams.from_percent(256, 10)
    return run_pruning_bench(db, queries, tuple(Strategy), params, fractions=(0.25, 0.5, 1.0), d=8)


def test_c07_pruning_power(record, walk_bench):
    ratio = walk_bench.lb_pruning_ratio(1.0)
    ordering = True
    for f in (0.25, 0.5, 1.0):
        t, k, i = (walk_bench.point(f, s).outcomes for s in (Strategy.TREE_ONLY, Strategy.TREE_KEOGH,
                                                              Strategy.TREE_IMPROVED))
        ordering &= all(c.dtw_evaluations <= b.dtw_evaluations <= a.dtw_evaluations for a, b, c in zip(t, k, i))
    ok = 1.5 <= ratio <= 6 and ordering and walk_bench.agreement
    evals = {s.value: walk_bench.point(1.0, s).mean("dtw_evaluations") for s in Strategy}
    record(7, "pruning power", ok, f"LB-stage pruned ratio improved/keogh = {ratio:.2f} (want [1.5, 6]); "
           f"evaluation ordering {'holds' if ordering else 'BROKEN'}; mean DTW calls {evals}")
    assert ok


def test_c08_exactness(record):
    families = list(Family)
    bad = []
    for k in range(50):
        fam = families[k % len(families)]
        rng = np.random.default_rng(800 + k)
        n = fam.default_length if fam not in (Family.RANDOM_WALK, Family.WHITE_NOISE) else int(rng.integers(16, 129))
        per = int(rng.integers(5, 60))
        db = generate_database(fam, None, per, n, seed=800 + k)
        queries = generate_database(fam, None, 1, n, seed=800 + k, instance_offset=per).series
        w = int(rng.integers(0, n // 4 + 1))
        params = SearchParams(1.0, w)
        index, cover = build_index(db, make_cover(n, min(8, n)))
        for q in queries[:3]:
            ref = nn_exhaustive(q, db, params)
            for s in Strategy:
                out = nearest_neighbor(q, db, s, params, index, cover, early_abandon=bool(k % 2))
                if out.best_id != ref.best_id or not close(out.best_dist, ref.best_dist):
                    bad.append((k, s.value))
    ok = not bad
    record(8, "search exactness", ok, f"{len(bad)} disagreements with exhaustive scan over 50 workloads, 5 strategies")
    assert ok


def test_c09_budgets(record, walk_bench):
    checked = failed = 0
    for pt in walk_bench.points:
        for out in pt.outcomes:
            if out.comparison_count is None:
                continue
            checked += 1
            if pt.strategy is Strategy.LINEAR_KEOGH:
                limit = keogh_comparison_budget(out.candidates_seen, 256)
            else:
                limit = improved_comparison_budget(out.candidates_seen, 256, out.first_pass_pruned_fraction)
            failed += out.comparison_count > limit
    db = generate_database(Family.CBF, None, 30, seed=9)
    for q in generate_database(Family.CBF, None, 2, seed=9, instance_offset=30).series:
        for p in (1.0, 2.0):
            for early in (False, True):
                for s in (Strategy.LINEAR_KEOGH, Strategy.LINEAR_IMPROVED):
                    out = nearest_neighbor(q, db, s, SearchParams(p, 12), early_abandon=early)
                    checked += 1
                    if s is Strategy.LINEAR_KEOGH:
                        failed += out.comparison_count > keogh_comparison_budget(len(db), db.length)
                    else:
                        failed += out.comparison_count > improved_comparison_budget(
                            len(db), db.length, out.first_pass_pruned_fraction)
    ok = failed == 0 and checked > 0
    record(9, "comparison budgets", ok, f"{failed} of {checked} linear scans over budget")
    assert ok


def test_c10_classification(record):
    parts, ok = [], True
    for fam in (Family.CONTROL_CHART, Family.CBF):
        rep = run_classification(fam, [2, 9], [1.0, 4.0, INF], repetitions=10, queries_per_rep=100, seed=10)
        a1, a4 = rep.at(9, 1.0), rep.at(9, 4.0)
        g1 = rep.at(9, 1.0) - rep.at(2, 1.0)
        ginf = rep.at(9, INF) - rep.at(2, INF)
        first, second = a1 >= a4 - 0.02, ginf <= g1
        ok &= first and second
        parts.append(f"{fam.value}: acc p1={a1:.3f} p4={a4:.3f} ({'ok' if first else 'NO'}), "
                     f"gain 2->9 p_inf={ginf:+.3f} vs p1={g1:+.3f} ({'ok' if second else 'NO'})")
    record(10, "classification ordering", ok, "; ".join(parts))
    assert ok
