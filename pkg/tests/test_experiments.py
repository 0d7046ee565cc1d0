import io
import math

import numpy as np
import pytest

from dtwsearch.core import Dataset, InvalidInputError, SearchParams
from dtwsearch.datagen import Family, generate_database
from dtwsearch.experiments import run_classification, run_pruning_bench, run_triangle, triangle_ratio, write_csv
from dtwsearch.search import Strategy


@pytest.fixture(scope="module")
def bench():
    db = generate_database(Family.RANDOM_WALK, 1, 100, 64, seed=1)
    queries = list(generate_database(Family.RANDOM_WALK, 1, 4, 64, seed=2).series)
    return run_pruning_bench(db, queries, params=SearchParams(1, 6), fractions=(0, 0.5, 1.0))


def test_bench_skips_zero_and_counts(bench, caplog):
    fractions = sorted({pt.fraction for pt in bench.points})
    assert fractions == [0.5, 1.0]
    assert bench.point(1.0, Strategy.LINEAR_KEOGH).mean("candidates_seen") == 100
    assert bench.point(0.5, Strategy.LINEAR_IMPROVED).size == 50
    assert bench.agreement


def test_bench_nesting(bench):
    for f in (0.5, 1.0):
        k = bench.point(f, Strategy.TREE_KEOGH)
        i = bench.point(f, Strategy.TREE_IMPROVED)
        assert i.mean("pruning_fraction") >= k.mean("pruning_fraction")
        for pt in bench.points:
            assert 0 <= pt.mean("pruning_fraction") <= 1
    assert bench.point(1.0, Strategy.LINEAR_KEOGH).budget_ok
    assert bench.point(1.0, Strategy.LINEAR_IMPROVED).budget_ok
    assert bench.lb_pruning_ratio(1.0) >= 1.0


def test_bench_csv(bench):
    buf = io.StringIO()
    write_csv(bench.rows(), buf)
    lines = buf.getvalue().splitlines()
    assert lines[0].startswith("fraction,database_size,strategy")
    assert len(lines) == 1 + 2 * len(Strategy)


def test_bench_errors():
    db = generate_database(Family.RANDOM_WALK, 1, 5, 16)
    with pytest.raises(InvalidInputError):
        run_pruning_bench(db, [])
    with pytest.raises(InvalidInputError):
        run_pruning_bench(Dataset(np.empty((0, 16))), [np.zeros(16)])
    with pytest.raises(InvalidInputError):
        run_pruning_bench(db, [np.zeros(15)])


def test_triangle_degenerate():
    x = np.ones(5)
    assert triangle_ratio(x, x, x, SearchParams(1, 5)) is None


def test_triangle_report():
    rep = run_triangle(Family.RANDOM_WALK, 30, 200, 1.0, seed=4)
    assert rep.violation_rate == rep.violation_count / rep.trials
    assert sum(rep.histogram) + rep.degenerate_count == rep.trials
    again = run_triangle(Family.RANDOM_WALK, 30, 200, 1.0, seed=4)
    assert again.histogram == rep.histogram
    with pytest.raises(InvalidInputError):
        run_triangle(Family.CBF, 30, 0, 1.0)


def test_triangle_max_norm_never_violates():
    assert run_triangle(Family.RANDOM_WALK, 20, 200, math.inf, seed=1).violation_count == 0


def test_classification_single_class():
    rep = run_classification(Family.CBF, [1, 2], [1.0, math.inf], repetitions=2, queries_per_rep=5, classes=1)
    assert all(acc == 1.0 for acc in rep.accuracy.values())


def test_classification_shape():
    rep = run_classification(Family.CONTROL_CHART, [1, 3], [1.0, 2.0], repetitions=2, queries_per_rep=10, seed=3)
    assert set(rep.accuracy) == {(1, 1.0), (1, 2.0), (3, 1.0), (3, 2.0)}
    assert all(0 <= a <= 1 for a in rep.accuracy.values())
    again = run_classification(Family.CONTROL_CHART, [1, 3], [1.0, 2.0], repetitions=2, queries_per_rep=10, seed=3)
    assert again.accuracy == rep.accuracy
    assert len(rep.rows()) == 4
